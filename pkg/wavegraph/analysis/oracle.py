"""Exact expectations from a truncated generator matrix.

The states reachable from f_0 within J jumps are enumerated breadth-first.
Moves that leave the enumerated set go to one absorbing overflow state,
whose probability bounds the truncation error. Transient distributions are
computed by uniformization:

    p_t = sum_k Poisson(k; q t) * p_0 P^k,   P = I + Q / q

with the Poisson series cut where its tail drops below 1e-13.
"""

from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.stats import poisson

from ..core.constants import WaveGraphConstants
from ..graph.graph import Graph, resolve_edge_ids, resolve_node_id
from ..ips.state import ParticleState
from ..utils.exceptions import EstimatorError
from .estimators import batch_energies, batch_l1, energy_rate_functional

# (S, V) node counts, (S, E) edge counts -> (S,) values
Functional = Callable[[np.ndarray, np.ndarray], np.ndarray]
FunctionalSpec = Union[str, Functional]


def transitions(graph: Graph, nodes: np.ndarray, edges: np.ndarray) -> List[Tuple[float, np.ndarray, np.ndarray]]:
    """All ``(rate, nodes', edges')`` moves out of one state."""
    moves = []
    for i in np.flatnonzero(nodes).tolist():
        s = 1 if nodes[i] > 0 else -1
        incident, orientation = graph.incident(i)
        new_edges = edges.copy()
        new_edges[incident] -= s * orientation
        moves.append((abs(int(nodes[i])) / graph.node_mass(i), nodes, new_edges))
    for e in np.flatnonzero(edges).tolist():
        s = 1 if edges[e] > 0 else -1
        tail, head = graph.edge_ends(e)
        new_nodes = nodes.copy()
        if not graph.is_fixed(tail):
            new_nodes[tail] += s
        if not graph.is_fixed(head):
            new_nodes[head] -= s
        moves.append((graph.edge_weight(e) * abs(int(edges[e])), new_nodes, edges))
    return moves


@dataclass
class GeneratorOracle:
    """Truncated generator of the particle system.

    Attributes:
        graph: Finite graph
        nodes: (S, V) node counts of the enumerated states
        edges: (S, E) edge coefficients of the enumerated states
        Q: (S+1, S+1) sparse generator; index S is the overflow state
        p0: Initial distribution, a point mass on f_0
        jump_cap: Jump cap J used for the enumeration
    """

    graph: Graph
    nodes: np.ndarray
    edges: np.ndarray
    Q: sp.csr_matrix
    p0: np.ndarray
    jump_cap: int

    @property
    def state_count(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def overflow(self) -> int:
        return self.state_count

    @property
    def uniform_rate(self) -> float:
        return float(np.max(-self.Q.diagonal())) if self.Q.shape[0] else 0.0


@dataclass(frozen=True)
class OracleResult:
    """Exact expectations at time t with their truncation diagnostics.

    ``values`` exclude the overflow state; ``error_bound`` is the total
    probability that is not accounted for by enumerated states.
    """

    t: float
    values: Dict[str, float]
    overflow_mass: float
    poisson_tail: float

    @property
    def error_bound(self) -> float:
        return self.overflow_mass + self.poisson_tail

    def to_dict(self) -> Dict[str, float]:
        return {"t": self.t, **self.values, "overflow_mass": self.overflow_mass,
                "poisson_tail": self.poisson_tail}


def generator_oracle(graph: Graph, f0: ParticleState, jump_cap: int,
                     state_cap: int = WaveGraphConstants.ORACLE_STATE_CAP) -> GeneratorOracle:
    """Enumerate the states reachable within ``jump_cap`` jumps.

    Breadth-first order guarantees that every state at depth <= J is known
    before the depth-J states are expanded, so a move out of a depth-J state
    into an unknown state is exactly a move beyond the cap.

    Raises:
        EstimatorError: If the graph is lazy, J < 0 or the enumeration
            exceeds ``state_cap`` states
    """
    if not graph.is_finite:
        raise EstimatorError("The generator oracle needs a finite graph")
    if int(jump_cap) != jump_cap or jump_cap < 0:
        raise EstimatorError(f"Jump cap must be a non-negative integer, got {jump_cap}", {"J": jump_cap})

    start = (f0.nodes.astype(np.int64).copy(), f0.edges.astype(np.int64).copy())
    index: Dict[bytes, int] = {_key(*start): 0}
    states: List[Tuple[np.ndarray, np.ndarray]] = [start]
    depth = [0]
    rows: List[int] = []
    cols: List[int] = []
    rates: List[float] = []
    overflow_rows: List[int] = []
    overflow_rates: List[float] = []

    queue = deque([0])
    while queue:
        s = queue.popleft()
        nodes, edges = states[s]
        for rate, new_nodes, new_edges in transitions(graph, nodes, edges):
            key = _key(new_nodes, new_edges)
            target = index.get(key)
            if target is None:
                if depth[s] >= jump_cap:
                    overflow_rows.append(s)
                    overflow_rates.append(rate)
                    continue
                if len(states) >= state_cap:
                    raise EstimatorError(
                        f"Oracle state space exceeds {state_cap} states at jump cap {jump_cap}",
                        {"states": len(states), "J": jump_cap},
                    )
                target = len(states)
                index[key] = target
                states.append((new_nodes, new_edges))
                depth.append(depth[s] + 1)
                queue.append(target)
            rows.append(s)
            cols.append(target)
            rates.append(rate)

    S = len(states)
    all_rows = np.asarray(rows + overflow_rows, dtype=np.int64)
    all_cols = np.asarray(cols + [S] * len(overflow_rows), dtype=np.int64)
    all_rates = np.asarray(rates + overflow_rates, dtype=np.float64)
    exit_rates = np.bincount(all_rows, weights=all_rates, minlength=S + 1)
    diag = np.arange(S + 1)
    Q = sp.csr_matrix(
        (np.concatenate([all_rates, -exit_rates]),
         (np.concatenate([all_rows, diag]), np.concatenate([all_cols, diag]))),
        shape=(S + 1, S + 1),
    )
    p0 = np.zeros(S + 1)
    p0[0] = 1.0
    node_array = np.array([n for n, _ in states], dtype=np.int64).reshape(S, graph.node_count)
    edge_array = np.array([e for _, e in states], dtype=np.int64).reshape(S, graph.edge_count)
    return GeneratorOracle(graph, node_array, edge_array, Q, p0, int(jump_cap))


def _key(nodes: np.ndarray, edges: np.ndarray) -> bytes:
    return nodes.tobytes() + b"|" + edges.tobytes()


def oracle_distribution(oracle: GeneratorOracle, t: float,
                        tail: float = WaveGraphConstants.UNIFORMIZATION_TAIL) -> Tuple[np.ndarray, float]:
    """Transient distribution p_t over the S+1 states and the dropped Poisson tail.

    Raises:
        EstimatorError: If t < 0
    """
    if not t >= 0:
        raise EstimatorError(f"Time must be non-negative, got {t}", {"t": t})
    q = oracle.uniform_rate
    if t == 0 or q == 0:
        return oracle.p0.copy(), 0.0
    mean = q * t
    K = int(poisson.isf(tail, mean))
    weights = poisson.pmf(np.arange(K + 1), mean)
    QT = oracle.Q.T.tocsr()
    term = oracle.p0.copy()
    p_t = weights[0] * term
    for k in range(1, K + 1):
        term = term + (QT @ term) / q
        p_t += weights[k] * term
    return p_t, float(poisson.sf(K, mean))


def named_functional(graph: Graph, name: str) -> Functional:
    """Functional from its textual name.

    ``node:<id>``, ``edge:<tail>-<head>`` (coefficient along e_{tail,head}),
    ``energy`` (||f||_2^2), ``l1`` (||f||_1) and ``energy_rate``.

    Raises:
        EstimatorError: For an unknown name
    """
    if name == "energy":
        return lambda nodes, edges: batch_energies(graph, nodes, edges)
    if name == "l1":
        return lambda nodes, edges: batch_l1(graph, nodes, edges)
    if name == "energy_rate":
        return lambda nodes, edges: energy_rate_functional(graph, nodes, edges)
    kind, _, arg = name.partition(":")
    if kind == "node" and arg:
        i = graph.node_index(resolve_node_id(graph, arg))
        return lambda nodes, edges: nodes[..., i].astype(np.float64)
    if kind == "edge" and "-" in arg:
        e, orientation = graph.edge_index(*resolve_edge_ids(graph, arg))
        return lambda nodes, edges: orientation * edges[..., e].astype(np.float64)
    raise EstimatorError(f"Unknown functional: {name!r}", {"functional": name})


def default_functionals(graph: Graph) -> List[str]:
    """Every node value, every edge coefficient, the energy and the l1 norm."""
    names = [f"node:{graph.node_id(i)}" for i in range(graph.node_count)]
    for e in range(graph.edge_count):
        tail, head = graph.edge_ends(e)
        names.append(f"edge:{graph.node_id(tail)}-{graph.node_id(head)}")
    return names + ["energy", "l1"]


def _functionals(graph: Graph, functionals: Union[Sequence[FunctionalSpec], Mapping[str, Functional]]) -> Dict[str, Functional]:
    if isinstance(functionals, Mapping):
        return dict(functionals)
    out: Dict[str, Functional] = {}
    for spec in functionals:
        if isinstance(spec, str):
            out[spec] = named_functional(graph, spec)
        else:
            out[getattr(spec, "__name__", f"functional_{len(out)}")] = spec
    return out


def oracle_expectations(oracle: GeneratorOracle, t: float,
                        functionals: Union[Sequence[FunctionalSpec], Mapping[str, Functional], None] = None,
                        tail: float = WaveGraphConstants.UNIFORMIZATION_TAIL) -> OracleResult:
    """E[phi(f_t)] over the enumerated states for each functional.

    The overflow state contributes nothing; |exact - value| is at most
    ``error_bound * max |phi|`` over the states that can carry that mass.
    """
    graph = oracle.graph
    named = _functionals(graph, default_functionals(graph) if functionals is None else functionals)
    p_t, poisson_tail = oracle_distribution(oracle, t, tail)
    probs = p_t[:oracle.state_count]
    values = {name: float(probs @ np.asarray(fn(oracle.nodes, oracle.edges), dtype=np.float64))
              for name, fn in named.items()}
    return OracleResult(t=float(t), values=values, overflow_mass=float(p_t[oracle.overflow]),
                        poisson_tail=poisson_tail)


def generator_action(oracle: GeneratorOracle, functional: Functional) -> np.ndarray:
    """(A phi)(s) for every enumerated state, from the exact transition list.

    Moves beyond the jump cap are evaluated at their true target state, so
    the action is exact on every enumerated state.
    """
    graph = oracle.graph
    current = np.asarray(functional(oracle.nodes, oracle.edges), dtype=np.float64)
    action = np.zeros(oracle.state_count)
    for s in range(oracle.state_count):
        moves = transitions(graph, oracle.nodes[s], oracle.edges[s])
        if not moves:
            continue
        targets_n = np.stack([m[1] for m in moves])
        targets_e = np.stack([m[2] for m in moves])
        rates = np.array([m[0] for m in moves])
        action[s] = rates @ (np.asarray(functional(targets_n, targets_e), dtype=np.float64) - current[s])
    return action


def oracle_rate(oracle: GeneratorOracle, t: float, functional: FunctionalSpec,
                tail: float = WaveGraphConstants.UNIFORMIZATION_TAIL) -> OracleResult:
    """d/dt E[phi(f_t)] = E[(A phi)(f_t)] evaluated on the truncated distribution."""
    graph = oracle.graph
    name, fn = next(iter(_functionals(graph, [functional]).items()))
    p_t, poisson_tail = oracle_distribution(oracle, t, tail)
    value = float(p_t[:oracle.state_count] @ generator_action(oracle, fn))
    return OracleResult(t=float(t), values={name: value}, overflow_mass=float(p_t[oracle.overflow]),
                        poisson_tail=poisson_tail)
