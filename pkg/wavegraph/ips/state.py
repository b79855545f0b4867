"""Integer-valued particle states of the IPS."""

from typing import Any, Mapping, Optional, Tuple, Union

import numpy as np

from ..core.constants import WaveGraphConstants
from ..graph.fields import Field, _edge_data, _node_data
from ..graph.graph import Graph
from ..utils.exceptions import FieldError
from .rate_tree import RateTree


class ParticleState:
    """Signed integer counts on nodes and edges with a cached event-rate tree.

    The total event rate ``R_tot`` equals ``||f||_1``. On lazy graphs the
    arrays grow as the graph materializes; entries of untouched nodes and
    edges are zero.

    Attributes:
        graph: Graph the state lives on
        time: Current time of the trajectory
        jumps: Number of jumps performed so far
    """

    def __init__(self, graph: Graph, nodes: np.ndarray, edges: np.ndarray, time: float = 0.0, jumps: int = 0):
        self.graph = graph
        self._nodes = np.array(nodes, dtype=np.int64)
        self._edges = np.array(edges, dtype=np.int64)
        self.time = float(time)
        self.jumps = int(jumps)
        self._node_size = len(self._nodes)
        self._edge_size = len(self._edges)
        self.sync()
        self.tree = RateTree(self.node_rates(), self.edge_rates())
        self.fixed_values = {int(i): int(self._nodes[i]) for i in np.flatnonzero(graph.fixed[:self._node_size])}

    # Storage --------------------------------------------------------------

    def sync(self) -> None:
        """Grow the arrays to the graph's current node and edge counts."""
        self._node_size = self.graph.node_count
        self._edge_size = self.graph.edge_count
        if len(self._nodes) < self._node_size:
            self._nodes = _grow(self._nodes, self._node_size)
        if len(self._edges) < self._edge_size:
            self._edges = _grow(self._edges, self._edge_size)

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes[:self._node_size]

    @property
    def edges(self) -> np.ndarray:
        return self._edges[:self._edge_size]

    # Rates ----------------------------------------------------------------

    def node_rates(self) -> np.ndarray:
        return np.abs(self.nodes) / self.graph.mass

    def edge_rates(self) -> np.ndarray:
        return self.graph.weight * np.abs(self.edges)

    @property
    def total_rate(self) -> float:
        """Cached R_tot from the rate tree."""
        return self.tree.total

    def l1_norm(self) -> float:
        """||f||_1 recomputed from the counts."""
        return float(np.sum(self.node_rates()) + np.sum(self.edge_rates()))

    @property
    def is_absorbing(self) -> bool:
        return self.total_rate <= 0.0

    def refresh_node(self, index: int) -> None:
        self.tree.set_node(index, abs(int(self._nodes[index])) / self.graph.node_mass(index))

    def refresh_edge(self, index: int) -> None:
        self.tree.set_edge(index, self.graph.edge_weight(index) * abs(int(self._edges[index])))

    # Conversions ----------------------------------------------------------

    def to_field(self) -> Field:
        return Field(self.graph, self.nodes.astype(np.float64), self.edges.astype(np.float64))

    def copy(self) -> "ParticleState":
        clone = ParticleState.__new__(ParticleState)
        clone.graph = self.graph
        clone._nodes = self._nodes.copy()
        clone._edges = self._edges.copy()
        clone._node_size = self._node_size
        clone._edge_size = self._edge_size
        clone.time = self.time
        clone.jumps = self.jumps
        clone.tree = self.tree.copy()
        clone.fixed_values = dict(self.fixed_values)
        return clone

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.nodes) + np.count_nonzero(self.edges))

    def __repr__(self) -> str:
        return (f"ParticleState(t={self.time:.6g}, jumps={self.jumps}, "
                f"support={self.support_size}, R_tot={self.total_rate:.6g})")


def _grow(arr: np.ndarray, size: int) -> np.ndarray:
    capacity = max(size, 2 * len(arr))
    out = np.zeros(capacity, dtype=arr.dtype)
    out[:len(arr)] = arr
    return out


def _as_integers(values: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise FieldError(f"{what} contain non-finite values")
    rounded = np.round(values)
    bad = np.flatnonzero(rounded != values)
    if len(bad):
        raise FieldError(
            f"{what} must be integers, got {values[bad[0]]} at position {int(bad[0])}",
            {"position": int(bad[0]), "value": float(values[bad[0]])},
        )
    if np.any(np.abs(rounded) >= WaveGraphConstants.MAX_ABS_COUNT):
        raise FieldError(f"{what} exceed the supported magnitude 2^40")
    return rounded.astype(np.int64)


def init_state(
    graph: Graph,
    node_values: Optional[Union[Mapping[Any, float], np.ndarray]] = None,
    edge_coeffs: Optional[Union[Mapping[Tuple[Any, Any], float], np.ndarray]] = None,
) -> ParticleState:
    """Build a particle state with its rate tree.

    Node data is keyed by node id (or an array in index order); edge data
    by ``(x, y)`` pairs, interpreted along e_xy, or an array in edge order.

    Raises:
        FieldError: For non-integer values or support on missing nodes
        GraphError: For unknown node ids or non-adjacent pairs
    """
    nodes = _node_data(graph, node_values)
    edges = _edge_data(graph, edge_coeffs)
    # lookups may have materialized lazy nodes after the arrays were sized
    nodes = np.concatenate([nodes, np.zeros(graph.node_count - len(nodes))])
    edges = np.concatenate([edges, np.zeros(graph.edge_count - len(edges))])
    return ParticleState(graph, _as_integers(nodes, "Node values"), _as_integers(edges, "Edge coefficients"))


def state_from_field(f: Field) -> ParticleState:
    """Particle state with the (integer) values of a field."""
    nodes, edges = f.padded()
    return ParticleState(f.graph, _as_integers(nodes, "Node values"), _as_integers(edges, "Edge coefficients"))
