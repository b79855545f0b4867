"""Exact event-driven simulation of the particle system.

Every jump draws the waiting time from Exponential(R_tot) first and then
picks the event with probability rate / R_tot from the rate tree:

* node event at z (rate |f(z)|/m_z, s = sgn f(z)): every incident edge
  coefficient moves by one particle, ``-s`` on edges stored as z->y and
  ``+s`` on edges stored as y->z. f(z) itself is unchanged.
* edge event on the stored pair (x, y) (rate k_xy |c|, s = sgn c):
  ``f(x) += s`` and ``f(y) -= s``, skipping V_1 nodes. c is unchanged.

The same random call sequence is used by the compiled kernel in
:mod:`wavegraph.ips.kernels`.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..core.constants import WaveGraphConstants
from ..graph.graph import ring_graph
from ..ode.periodic import PeriodicData
from ..utils.exceptions import FieldError, SimulationError
from .state import ParticleState


@dataclass(frozen=True)
class EventRecord:
    """One jump of a trajectory.

    Attributes:
        n: Jump index, starting at 1
        tau: Jump time
        xi: Waiting time since the previous jump
        kind: "node" or "edge"
        index: Node or edge index of the event
        sign: s in {-1, +1}
    """

    n: int
    tau: float
    xi: float
    kind: str
    index: int
    sign: int

    def entity_id(self, graph) -> str:
        return graph.node_label(self.index) if self.kind == "node" else graph.edge_label(self.index)


class Observer:
    """Hooks and accumulators attached to a simulation.

    Args:
        watch: Node ids whose time integrals are accumulated; "all" for
            every node of a finite graph
        sample_times: Times at which state snapshots and jump counts are taken
        on_event: Callable ``(record, state)`` fired after every jump
        record_events: Keep every EventRecord (trajectory dump)
    """

    def __init__(
        self,
        watch: Union[str, Iterable[Any], None] = None,
        sample_times: Sequence[float] = (),
        on_event: Optional[Callable[[EventRecord, ParticleState], None]] = None,
        record_events: bool = False,
    ):
        self.watch = watch
        self.sample_times = np.sort(np.asarray(sample_times, dtype=np.float64))
        self.on_event = on_event
        self.record_events = record_events

        self.events: List[EventRecord] = []
        self.snapshot_times: List[float] = []
        self.snapshots: List[tuple] = []
        self.sample_jumps: List[int] = []
        self.sample_integrals: List[np.ndarray] = []
        self.integrals = np.zeros(0)

        self._positions: Dict[int, int] = {}
        self._graph = None
        self._watch_index = np.zeros(0, dtype=np.int64)
        self._last = np.zeros(0)
        self._next_sample = 0
        self._start_jumps = 0

    def attach(self, state: ParticleState) -> None:
        graph = state.graph
        self._graph = graph
        if self.watch == "all":
            if not graph.is_finite:
                raise SimulationError("Watching all nodes requires a finite graph")
            indices = list(range(graph.node_count))
        elif self.watch is None:
            indices = []
        else:
            indices = [graph.node_index(node_id) for node_id in self.watch]
        state.sync()
        self._watch_index = np.asarray(indices, dtype=np.int64)
        self._positions = {i: p for p, i in enumerate(indices)}
        self.integrals = np.zeros(len(indices))
        self._last = np.full(len(indices), state.time)
        self._next_sample = int(np.searchsorted(self.sample_times, state.time, side="left"))
        self._start_jumps = state.jumps

    @property
    def watched_ids(self) -> List[Any]:
        return [self._graph.node_id(i) for i in self._positions]

    def node_changing(self, index: int, old_value: int, t: float) -> None:
        p = self._positions.get(index)
        if p is not None:
            self.integrals[p] += old_value * (t - self._last[p])
            self._last[p] = t

    def advance(self, state: ParticleState, t: float, inclusive: bool = False) -> None:
        """Record every pending sample time before t (or up to t)."""
        times = self.sample_times
        while self._next_sample < len(times) and (
            times[self._next_sample] < t or (inclusive and times[self._next_sample] <= t)
        ):
            s = float(times[self._next_sample])
            self.snapshot_times.append(s)
            self.snapshots.append((state.nodes.copy(), state.edges.copy()))
            self.sample_jumps.append(state.jumps - self._start_jumps)
            current = state.nodes[self._watch_index] if len(self._watch_index) else np.zeros(0)
            self.sample_integrals.append(self.integrals + current * (s - self._last))
            self._next_sample += 1

    def jumped(self, record: EventRecord, state: ParticleState) -> None:
        if self.record_events:
            self.events.append(record)
        if self.on_event is not None:
            self.on_event(record, state)

    def finish(self, state: ParticleState, T: float) -> None:
        if len(self._watch_index):
            self.integrals += state.nodes[self._watch_index] * (T - self._last)
            self._last[:] = T

    def integral(self, node_id: Any) -> float:
        """Exact integral of f_s(x) from the start to the final time."""
        return float(self.integrals[self._positions[self._graph.node_index(node_id)]])


@dataclass
class SimulationSummary:
    """Outcome of :func:`simulate`."""

    jumps: int
    state: ParticleState
    observer: Optional[Observer] = None


def debug_enabled() -> bool:
    return os.environ.get(WaveGraphConstants.DEBUG_ENVAR, "").lower() in ("1", "true", "yes", "on")


def _sign(value: int) -> int:
    return 1 if value > 0 else -1


def _apply_event(state: ParticleState, u: float, xi: float, observer: Optional[Observer]) -> EventRecord:
    graph = state.graph
    kind, index = state.tree.sample(u)
    tau = state.time + xi
    if kind == "node":
        s = _sign(int(state._nodes[index]))
        edges, orientations = graph.incident(index)
        if not graph.is_finite:
            state.sync()
        for e, orientation in zip(edges.tolist(), orientations.tolist()):
            state._edges[e] -= s * orientation
            state.refresh_edge(e)
    else:
        s = _sign(int(state._edges[index]))
        tail, head = graph.edge_ends(index)
        for node, delta in ((tail, s), (head, -s)):
            if graph.is_fixed(node):
                continue
            if observer is not None:
                observer.node_changing(node, int(state._nodes[node]), tau)
            state._nodes[node] += delta
            state.refresh_node(node)
    state.time = tau
    state.jumps += 1
    return EventRecord(n=state.jumps, tau=tau, xi=xi, kind=kind, index=int(index), sign=s)


def step(state: ParticleState, rng: np.random.Generator, observer: Optional[Observer] = None,
         debug: Optional[bool] = None) -> EventRecord:
    """Perform one jump of the process.

    Raises:
        SimulationError: If the state is absorbing (R_tot = 0), or an
            invariant check fails in debug mode
    """
    total = state.total_rate
    if total <= 0.0:
        raise SimulationError("Cannot step an absorbing state (R_tot = 0)", jumps=state.jumps)
    xi = rng.standard_exponential() / total
    u = rng.random()
    checker = _InvariantChecker(state) if (debug_enabled() if debug is None else debug) else None
    record = _apply_event(state, u, xi, observer)
    if checker is not None:
        checker.check(state, record)
    return record


def simulate(
    state: ParticleState,
    T: float,
    observer: Optional[Observer] = None,
    rng: Optional[np.random.Generator] = None,
    max_jumps: int = WaveGraphConstants.MAX_JUMPS,
    debug: Optional[bool] = None,
) -> SimulationSummary:
    """Run the process until time T.

    The state is advanced in place. Observer samples are taken in time
    order and node integrals are closed with the final interval up to T.

    Raises:
        SimulationError: If T lies before the current time or more than
            ``max_jumps`` jumps occur
    """
    if not T >= state.time:
        raise SimulationError(f"Horizon {T} lies before the current time {state.time}", jumps=state.jumps)
    rng = rng if rng is not None else np.random.default_rng()
    debug = debug_enabled() if debug is None else debug
    if observer is not None:
        observer.attach(state)
    start = state.jumps

    while True:
        total = state.total_rate
        if total <= 0.0:
            break
        xi = rng.standard_exponential() / total
        if state.time + xi > T:
            break
        if state.jumps - start >= max_jumps:
            raise SimulationError(
                f"Jump count exceeded the circuit breaker ({max_jumps}) before t={T}",
                jumps=state.jumps - start,
                details={"time": state.time, "horizon": T},
            )
        if observer is not None:
            observer.advance(state, state.time + xi)
        u = rng.random()
        checker = _InvariantChecker(state) if debug else None
        record = _apply_event(state, u, xi, observer)
        if checker is not None:
            checker.check(state, record)
        if observer is not None:
            observer.jumped(record, state)

    if observer is not None:
        observer.advance(state, T, inclusive=True)
        observer.finish(state, T)
    state.time = float(T)
    return SimulationSummary(jumps=state.jumps - start, state=state, observer=observer)


class _InvariantChecker:
    """Per-jump consistency checks used in debug mode."""

    def __init__(self, state: ParticleState):
        self.nodes = state.nodes.copy()
        self.edges = state.edges.copy()
        self.l1 = state.l1_norm()
        self.linf = _linf(self.nodes, self.edges)

    def check(self, state: ParticleState, record: EventRecord) -> None:
        nodes, edges = state.nodes, state.edges
        before_nodes = np.concatenate([self.nodes, np.zeros(len(nodes) - len(self.nodes), dtype=np.int64)])
        before_edges = np.concatenate([self.edges, np.zeros(len(edges) - len(self.edges), dtype=np.int64)])
        jumps = state.jumps
        if max(np.max(np.abs(nodes - before_nodes), initial=0), np.max(np.abs(edges - before_edges), initial=0)) > 1:
            raise SimulationError("A jump changed some value by more than one particle", jumps=jumps)
        l1 = state.l1_norm()
        Md = state.graph.constants.Md
        if l1 - self.l1 > Md * (1 + 1e-12) + 1e-9:
            raise SimulationError(f"||f||_1 grew by {l1 - self.l1} > Md = {Md} in one jump", jumps=jumps)
        if _linf(nodes, edges) - self.linf > 1:
            raise SimulationError("||f||_inf grew by more than one in one jump", jumps=jumps)
        if abs(state.total_rate - l1) > 1e-9 * max(1.0, l1):
            raise SimulationError(
                f"Cached total rate {state.total_rate} differs from ||f||_1 = {l1}",
                jumps=jumps,
                details={"cached": state.total_rate, "recomputed": l1},
            )
        for index, value in state.fixed_values.items():
            if nodes[index] != value:
                raise SimulationError(f"V_1 node {state.graph.node_label(index)} changed value", jumps=jumps)
        if _linf(nodes, edges) >= WaveGraphConstants.MAX_ABS_COUNT:
            raise SimulationError("Particle count exceeded 2^40", jumps=jumps)


def _linf(nodes: np.ndarray, edges: np.ndarray) -> int:
    return int(max(np.max(np.abs(nodes), initial=0), np.max(np.abs(edges), initial=0)))


def hydro_init(n: int, N: int, data: PeriodicData) -> ParticleState:
    """Floored initial state on the ring G_n for the hydrodynamic experiments.

    ``f(k) = floor(N * psi(k/n))`` and the coefficient of edge <k, k+1> along
    e_+ is ``floor(N * n * (phi((k+1)/n) - phi(k/n)))``. Values within
    1e-9 below an integer are treated as that integer.

    Raises:
        FieldError: If N < 1
        GraphError: If n < 3
    """
    graph = ring_graph(n)
    if int(N) != N or N < 1:
        raise FieldError(f"Particle scale N must be a positive integer, got {N}", {"N": N})
    k = np.arange(n)
    x = k / n
    x_next = (k + 1) / n
    node_values = N * data.psi(x)
    edge_values = N * n * (data.phi(x_next) - data.phi(x))
    nodes = _floor(node_values)
    edges = _floor(edge_values)
    return ParticleState(graph, nodes, edges)


def _floor(values: np.ndarray) -> np.ndarray:
    return np.floor(values + WaveGraphConstants.FLOOR_TOLERANCE).astype(np.int64)


def write_trajectory(events: Sequence[EventRecord], graph, path: Union[str, Path]) -> Path:
    """Dump jump records as CSV with columns n, tau, kind, id, sign."""
    path = Path(path)
    frame = pd.DataFrame(
        {
            "n": [e.n for e in events],
            "tau": [e.tau for e in events],
            "kind": [e.kind for e in events],
            "id": [e.entity_id(graph) for e in events],
            "sign": [e.sign for e in events],
        },
        columns=["n", "tau", "kind", "id", "sign"],
    )
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
