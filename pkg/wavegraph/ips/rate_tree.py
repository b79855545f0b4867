"""Binary sum tree for dynamic weighted sampling of events.

Leaves hold the event rates; every internal node holds the sum of its two
children and the root holds the total rate. Updating one rate and sampling
an event both take O(log n). Internal sums are always recomputed from the
children, so repeated updates do not accumulate drift.

Node i of the graph owns leaf slot ``2*i`` and edge e owns slot ``2*e + 1``;
interleaving lets the tree grow as lazy graphs materialize new entities.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def tree_update(tree, cap, slot, rate):
    pos = cap + slot
    tree[pos] = rate
    pos //= 2
    while pos >= 1:
        tree[pos] = tree[2 * pos] + tree[2 * pos + 1]
        pos //= 2


@njit(cache=True)
def tree_sample(tree, cap, u):
    """Leaf slot selected with probability rate / total for u in [0, 1)."""
    target = u * tree[1]
    pos = 1
    while pos < cap:
        left = tree[2 * pos]
        # rounding can push target past the left sum into an empty right subtree
        if target < left or tree[2 * pos + 1] <= 0.0:
            pos = 2 * pos
        else:
            target -= left
            pos = 2 * pos + 1
    return pos - cap


@njit(cache=True)
def tree_rebuild(tree, cap):
    for pos in range(cap - 1, 0, -1):
        tree[pos] = tree[2 * pos] + tree[2 * pos + 1]


def capacity_for(slots: int) -> int:
    """Smallest power of two holding ``slots`` leaves (at least 2)."""
    cap = 2
    while cap < slots:
        cap *= 2
    return cap


def build_tree(node_rates: np.ndarray, edge_rates: np.ndarray, cap: int = 0) -> tuple:
    """Tree array and capacity for the given rates."""
    slots = 2 * max(len(node_rates), len(edge_rates), 1)
    cap = max(cap, capacity_for(slots))
    tree = np.zeros(2 * cap, dtype=np.float64)
    tree[cap:cap + 2 * len(node_rates):2] = node_rates
    tree[cap + 1:cap + 1 + 2 * len(edge_rates):2] = edge_rates
    tree_rebuild(tree, cap)
    return tree, cap


class RateTree:
    """Rates of all node and edge events of a particle state."""

    def __init__(self, node_rates: np.ndarray, edge_rates: np.ndarray):
        self.tree, self.cap = build_tree(np.asarray(node_rates, dtype=np.float64),
                                         np.asarray(edge_rates, dtype=np.float64))

    @property
    def total(self) -> float:
        return float(self.tree[1])

    def _ensure(self, slot: int) -> None:
        if slot < self.cap:
            return
        cap = capacity_for(slot + 1)
        tree = np.zeros(2 * cap, dtype=np.float64)
        tree[cap:cap + self.cap] = self.tree[self.cap:]
        tree_rebuild(tree, cap)
        self.tree, self.cap = tree, cap

    def set_node(self, index: int, rate: float) -> None:
        self._ensure(2 * index)
        tree_update(self.tree, self.cap, 2 * index, rate)

    def set_edge(self, index: int, rate: float) -> None:
        self._ensure(2 * index + 1)
        tree_update(self.tree, self.cap, 2 * index + 1, rate)

    def node_rate(self, index: int) -> float:
        slot = 2 * index
        return float(self.tree[self.cap + slot]) if slot < self.cap else 0.0

    def edge_rate(self, index: int) -> float:
        slot = 2 * index + 1
        return float(self.tree[self.cap + slot]) if slot < self.cap else 0.0

    def sample(self, u: float) -> tuple:
        """Select an event for a uniform draw u.

        Returns:
            ("node", index) or ("edge", index)
        """
        slot = int(tree_sample(self.tree, self.cap, u))
        return ("node", slot // 2) if slot % 2 == 0 else ("edge", slot // 2)

    def leaf_sum(self) -> float:
        """Sum of all leaves, recomputed from scratch."""
        return float(np.sum(self.tree[self.cap:]))

    def copy(self) -> "RateTree":
        clone = RateTree.__new__(RateTree)
        clone.tree = self.tree.copy()
        clone.cap = self.cap
        return clone
