"""Independent replicas of the particle system sampled at fixed times."""

import copy
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence

import numpy as np

from ..core.constants import WaveGraphConstants
from ..utils.exceptions import EstimatorError, SimulationError
from ..utils.parallel import ReplicaPool, replica_rng
from .engine import Observer, simulate
from .kernels import STATUS_OK, simulate_kernel
from .state import ParticleState


@dataclass
class ReplicaBatch:
    """Samples of R replicas at S times.

    Attributes:
        times: (S,) sample times
        nodes: (R, S, V) node counts (finite graphs only)
        edges: (R, S, E) edge counts (finite graphs only)
        integrals: (R, S, W) time integrals of the watched nodes
        jumps: (R, S) jump counts
        watch: Node ids of the integral columns
        seed: Master seed
    """

    graph: Any
    times: np.ndarray
    nodes: Optional[np.ndarray]
    edges: Optional[np.ndarray]
    integrals: np.ndarray
    jumps: np.ndarray
    watch: List[Any]
    seed: int

    @property
    def replicas(self) -> int:
        return int(self.jumps.shape[0])

    def time_index(self, t: float) -> int:
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=0.0, atol=WaveGraphConstants.GRID_TOLERANCE))
        if not len(hits):
            raise EstimatorError(f"Time {t} was not sampled", {"t": t})
        return int(hits[0])


class _ReplicaTask:
    """Picklable per-replica work item."""

    def __init__(self, state: ParticleState, times: np.ndarray, seed: int, watch: Sequence[Any], max_jumps: int):
        self.state = state
        self.times = times
        self.seed = seed
        self.watch = list(watch)
        self.max_jumps = max_jumps

    def __call__(self, index: int):
        rng = replica_rng(self.seed, index)
        graph = self.state.graph
        if graph.is_finite:
            nodes, edges, integrals, jumps, status = simulate_kernel(
                self.state.nodes, self.state.edges, graph.mass, graph.weight, graph.tail, graph.head,
                graph.fixed, graph.inc_ptr, graph.inc_edge, graph.inc_sign,
                self.times, rng, self.max_jumps,
            )
            if status != STATUS_OK:
                raise SimulationError(
                    f"Replica {index} exceeded the circuit breaker of {self.max_jumps} jumps",
                    jumps=self.max_jumps,
                    details={"replica": index, "seed": self.seed},
                )
            return nodes, edges, integrals, jumps

        # lazy graphs grow while simulating; every replica starts from a private copy
        state = copy.deepcopy(self.state)
        observer = Observer(watch=self.watch, sample_times=self.times)
        simulate(state, float(self.times[-1]) if len(self.times) else 0.0, observer, rng, self.max_jumps)
        integrals = np.asarray(observer.sample_integrals).reshape(len(self.times), len(self.watch))
        return None, None, integrals, np.asarray(observer.sample_jumps, dtype=np.int64)


def run_replicas(
    state: ParticleState,
    times: Sequence[float],
    replicas: int,
    seed: int,
    watch: Optional[Sequence[Any]] = None,
    workers: Optional[int] = 1,
    max_jumps: int = WaveGraphConstants.MAX_JUMPS,
    verbose: bool = False,
) -> ReplicaBatch:
    """Simulate independent copies of ``state`` and sample them at ``times``.

    On finite graphs the compiled kernel is used and every node is watched;
    on lazy graphs the Python engine runs with an Observer on ``watch``.

    Raises:
        EstimatorError: For negative or unsorted times, or a lazy graph
            without watched nodes
    """
    times = np.asarray(times, dtype=np.float64)
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise EstimatorError("Sample times must be non-negative and sorted")
    graph = state.graph
    if graph.is_finite:
        watch_ids = graph.node_ids
    else:
        if not watch:
            raise EstimatorError("Simulations on lazy graphs need explicit watched nodes")
        watch_ids = list(watch)
    task = _ReplicaTask(state, times, seed, watch_ids, max_jumps)
    results = ReplicaPool(workers=workers, verbose=verbose).map(task, replicas)

    S = len(times)
    integrals = np.stack([r[2] for r in results]) if results else np.zeros((0, S, len(watch_ids)))
    jumps = np.stack([r[3] for r in results]) if results else np.zeros((0, S), dtype=np.int64)
    if graph.is_finite and results:
        nodes = np.stack([r[0] for r in results])
        edges = np.stack([r[1] for r in results])
    else:
        nodes = edges = None
    return ReplicaBatch(graph, times, nodes, edges, integrals, jumps, watch_ids, seed)
