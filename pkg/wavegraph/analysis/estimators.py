"""Monte Carlo estimators built on replica batches of the particle system.

Every estimator returns :class:`McEstimate` objects carrying the estimate,
its standard error, the replica count and the master seed, and is
reproducible from ``(seed, replicas)``.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..core.constants import WaveGraphConstants
from ..graph.fields import Field, as_arrays
from ..graph.graph import Graph, NodeValues
from ..graph.operators import norm_sq
from ..ips.replicas import run_replicas
from ..ips.state import ParticleState, state_from_field
from ..ips.yule import yule_counts
from ..ode.solver import make_zeta, solve_at, solve_ibvp
from ..utils.exceptions import EstimatorError, RoundingWarning
from .bounds import dominance_start, finite_bound, jump_count_bound, lln_bound, lln_error_bound


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate with standard error ``std / sqrt(R)``."""

    estimate: float
    stderr: float
    replicas: int
    seed: int
    bound: Optional[float] = None

    @classmethod
    def from_samples(cls, samples: np.ndarray, seed: int, bound: Optional[float] = None) -> "McEstimate":
        samples = np.asarray(samples, dtype=np.float64)
        R = len(samples)
        if R < WaveGraphConstants.MIN_REPLICAS:
            raise EstimatorError(f"At least {WaveGraphConstants.MIN_REPLICAS} replicas are required, got {R}")
        return cls(float(np.mean(samples)), float(np.std(samples, ddof=1) / math.sqrt(R)), R, seed, bound)

    def within(self, value: float, sigmas: float = 3.0, slack: float = 0.0) -> bool:
        """True if |estimate - value| <= sigmas * stderr + slack."""
        return abs(self.estimate - value) <= sigmas * self.stderr + slack

    def shifted(self, offset: float) -> "McEstimate":
        return McEstimate(self.estimate + offset, self.stderr, self.replicas, self.seed, self.bound)

    def to_dict(self) -> Dict[str, Any]:
        return {"estimate": self.estimate, "stderr": self.stderr, "R": self.replicas,
                "seed": self.seed, "bound": self.bound}


def _check_replicas(replicas: int) -> None:
    if int(replicas) != replicas or replicas < WaveGraphConstants.MIN_REPLICAS:
        raise EstimatorError(
            f"At least {WaveGraphConstants.MIN_REPLICAS} replicas are required, got {replicas}",
            {"R": replicas},
        )


def _check_time(t: float) -> None:
    if not t >= 0:
        raise EstimatorError(f"Time must be non-negative, got {t}", {"t": t})


def _require_finite(graph: Graph, what: str) -> None:
    if not graph.is_finite:
        raise EstimatorError(f"{what} requires a finite graph")


def _require_free_boundary(f0: Any) -> None:
    nodes, _ = as_arrays(f0)
    fixed = f0.graph.fixed
    if np.any(nodes[fixed] != 0):
        raise EstimatorError("The initial state must vanish on V_1 for this estimator")


def batch_energies(graph: Graph, nodes: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """||f||_2^2 over the trailing axis of stacked node/edge arrays."""
    nodes = nodes.astype(np.float64)
    edges = edges.astype(np.float64)
    return (nodes * nodes) @ (1.0 / graph.mass) + (edges * edges) @ graph.weight


def batch_l1(graph: Graph, nodes: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.abs(nodes) @ (1.0 / graph.mass) + np.abs(edges) @ graph.weight


def floor_to_state(zeta: Field) -> ParticleState:
    """Particle state with floor(zeta), warning when anything was rounded."""
    nodes, edges = zeta.padded()
    floored = Field(zeta.graph, np.floor(nodes), np.floor(edges))
    residual = math.sqrt(norm_sq(zeta - floored))
    if residual > 0:
        warnings.warn(
            f"Initial data is not integer-valued; floored with residual ||zeta - floor(zeta)||_2 = {residual:.6g}",
            RoundingWarning,
            stacklevel=3,
        )
    return state_from_field(floored)


def scaled_floor(zeta: Field, scale: float) -> ParticleState:
    """Particle state floor(c * zeta), values within 1e-9 below an integer rounded up."""
    if not scale > 0:
        raise EstimatorError(f"Scale must be positive, got {scale}")
    nodes, edges = zeta.padded()
    tol = WaveGraphConstants.FLOOR_TOLERANCE
    return state_from_field(Field(zeta.graph, np.floor(scale * nodes + tol), np.floor(scale * edges + tol)))


def _lazy_zeta(graph: Graph, phi: Mapping[Any, float], psi: Optional[Mapping[Any, float]]) -> Field:
    # phi is zero away from its keys, so only edges at its support carry data
    node_values: Dict[int, float] = {}
    for node_id, value in (psi or {}).items():
        i = graph.node_index(node_id)
        node_values[i] = graph.node_mass(i) * float(value)
    phi_index = {graph.node_index(k): float(v) for k, v in phi.items()}
    edge_values: Dict[int, float] = {}
    for i in list(phi_index):
        for e in graph.incident(i)[0].tolist():
            tail, head = graph.edge_ends(e)
            edge_values[e] = phi_index.get(head, 0.0) - phi_index.get(tail, 0.0)
    nodes = np.zeros(graph.node_count)
    edges = np.zeros(graph.edge_count)
    for i, v in node_values.items():
        nodes[i] = v
    for e, v in edge_values.items():
        edges[e] = v
    return Field(graph, nodes, edges)


def feynman_kac(
    graph: Graph,
    phi: NodeValues,
    psi: Optional[NodeValues],
    targets: Iterable[Any],
    t: float,
    replicas: int,
    seed: int,
    workers: Optional[int] = 1,
) -> Dict[Any, McEstimate]:
    """Stochastic representation of the displacement u(x, t).

    ``u(x, t) = phi(x) + (1/m_x) E int_0^t f_s(x) ds`` with f_0 = zeta built
    from (phi, psi). Non-integer zeta is floored with a RoundingWarning. On
    lazy lattices phi and psi are mappings with finite support.

    Returns:
        Mapping target node id -> McEstimate of u(x, t)

    Raises:
        EstimatorError: If R < 2 or t < 0
    """
    _check_replicas(replicas)
    _check_time(t)
    targets = list(targets)
    if graph.is_finite:
        zeta = make_zeta(graph, phi, psi)
        phi_of = graph.node_array(phi)
        phi_at = {x: float(phi_of[graph.node_index(x)]) for x in targets}
    else:
        if not isinstance(phi, Mapping):
            raise EstimatorError("On lazy graphs phi must be a mapping with finite support")
        zeta = _lazy_zeta(graph, phi, psi)
        phi_at = {x: float(phi.get(x, 0.0)) for x in targets}
    f0 = floor_to_state(zeta)
    batch = run_replicas(f0, [t], replicas, seed, watch=targets, workers=workers)
    results = {}
    for x in targets:
        samples = batch.integrals[:, 0, batch.watch.index(x)] / graph.node_mass(graph.node_index(x))
        results[x] = McEstimate.from_samples(samples, seed).shifted(phi_at[x])
    return results


@dataclass
class MeanField:
    """Replica means and standard errors of f_t at the sample times."""

    graph: Graph
    times: np.ndarray
    node_mean: np.ndarray
    edge_mean: np.ndarray
    node_stderr: np.ndarray
    edge_stderr: np.ndarray
    replicas: int
    seed: int

    def _index(self, t: float) -> int:
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=0.0, atol=WaveGraphConstants.GRID_TOLERANCE))
        if not len(hits):
            raise EstimatorError(f"Time {t} was not sampled")
        return int(hits[0])

    def mean(self, t: float) -> Field:
        k = self._index(t)
        return Field(self.graph, self.node_mean[k], self.edge_mean[k])

    def stderr(self, t: float) -> Field:
        k = self._index(t)
        return Field(self.graph, self.node_stderr[k], self.edge_stderr[k])

    def agreement(self, reference: Field, t: float, sigmas: float = 4.0) -> float:
        """Fraction of coordinates within ``sigmas`` standard errors of reference.

        Coordinates with zero standard error must match exactly (1e-12).
        """
        k = self._index(t)
        ref_nodes, ref_edges = as_arrays(reference)
        mean = np.concatenate([self.node_mean[k], self.edge_mean[k]])
        err = np.concatenate([self.node_stderr[k], self.edge_stderr[k]])
        ref = np.concatenate([ref_nodes, ref_edges])
        ok = np.abs(mean - ref) <= sigmas * err + 1e-12 * np.maximum(1.0, np.abs(ref))
        return float(np.mean(ok)) if len(ok) else 1.0


def mean_field(graph: Graph, f0: ParticleState, times: Sequence[float], replicas: int, seed: int,
               workers: Optional[int] = 1) -> MeanField:
    """Empirical mean of f_t over replicas at each sample time.

    Raises:
        EstimatorError: If R < 2 or the graph is lazy
    """
    _check_replicas(replicas)
    _require_finite(graph, "mean_field")
    batch = run_replicas(f0, times, replicas, seed, workers=workers)
    root = math.sqrt(replicas)
    return MeanField(
        graph=graph,
        times=batch.times,
        node_mean=batch.nodes.mean(axis=0),
        edge_mean=batch.edges.mean(axis=0),
        node_stderr=batch.nodes.std(axis=0, ddof=1) / root,
        edge_stderr=batch.edges.std(axis=0, ddof=1) / root,
        replicas=replicas,
        seed=seed,
    )


def fluctuation_series(
    graph: Graph,
    f0: ParticleState,
    times: Sequence[float],
    replicas: int,
    seed: int,
    dt: float = WaveGraphConstants.DEFAULT_DT,
    workers: Optional[int] = 1,
) -> List[McEstimate]:
    """V(t) = E||f_t||_2^2 - ||E f_t||_2^2 at several times from one batch.

    The exact mean E f_t comes from the ODE solver. Each estimate carries
    min(lln_bound, finite_bound) as its bound.
    """
    _check_replicas(replicas)
    _require_finite(graph, "fluctuation")
    _require_free_boundary(f0)
    times = [float(t) for t in times]
    for t in times:
        _check_time(t)
    batch = run_replicas(f0, times, replicas, seed, workers=workers)
    means = solve_at(graph, f0, times, dt)
    estimates = []
    for k, t in enumerate(times):
        samples = batch_energies(graph, batch.nodes[:, k], batch.edges[:, k])
        exact_mean = norm_sq(means[k])
        bound = min(lln_bound(f0, t), finite_bound(f0, t))
        estimates.append(McEstimate.from_samples(samples, seed, bound).shifted(-exact_mean))
    return estimates


def fluctuation(graph: Graph, f0: ParticleState, t: float, replicas: int, seed: int,
                dt: float = WaveGraphConstants.DEFAULT_DT, workers: Optional[int] = 1) -> McEstimate:
    """McEstimate of V(t) = E||f_t - E f_t||_2^2.

    Raises:
        EstimatorError: If f0 is nonzero on V_1, R < 2 or t < 0
    """
    return fluctuation_series(graph, f0, [t], replicas, seed, dt, workers)[0]


def energy_rate_functional(graph: Graph, nodes: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Right-hand side of the energy growth identity for stacked states.

    ``sum_x |f(x)|/m_x * sum_{y~x} k_xy
    + sum_<x,y> k_xy (1_{V_0}(x)/m_x + 1_{V_0}(y)/m_y) |c_xy|``
    """
    degree_weight = (np.bincount(graph.tail, weights=graph.weight, minlength=graph.node_count)
                     + np.bincount(graph.head, weights=graph.weight, minlength=graph.node_count))
    free_over_mass = (~graph.fixed).astype(np.float64) / graph.mass
    edge_factor = graph.weight * (free_over_mass[graph.tail] + free_over_mass[graph.head])
    return np.abs(nodes) @ (degree_weight / graph.mass) + np.abs(edges) @ edge_factor


def energy_rate_check(graph: Graph, f0: ParticleState, t: float, dt_fd: float, replicas: int, seed: int,
                      workers: Optional[int] = 1) -> Tuple[McEstimate, McEstimate]:
    """Both sides of the energy growth identity at time t.

    lhs is the central difference of E||f_s||_2^2 over [t - dt_fd, t + dt_fd]
    (pathwise differences of the same replicas); rhs is the Monte Carlo
    mean of :func:`energy_rate_functional` at t.

    Raises:
        EstimatorError: If f0 is nonzero on V_1, dt_fd <= 0 or dt_fd > t
    """
    _check_replicas(replicas)
    _require_finite(graph, "energy_rate_check")
    _require_free_boundary(f0)
    if not dt_fd > 0:
        raise EstimatorError(f"Finite-difference step must be positive, got {dt_fd}")
    if dt_fd > t:
        raise EstimatorError(f"Finite-difference window [t - {dt_fd}, t + {dt_fd}] starts before 0")
    times = [t - dt_fd, t, t + dt_fd]
    batch = run_replicas(f0, times, replicas, seed, workers=workers)
    before = batch_energies(graph, batch.nodes[:, 0], batch.edges[:, 0])
    after = batch_energies(graph, batch.nodes[:, 2], batch.edges[:, 2])
    lhs = McEstimate.from_samples((after - before) / (2.0 * dt_fd), seed)
    rhs = McEstimate.from_samples(energy_rate_functional(graph, batch.nodes[:, 1], batch.edges[:, 1]), seed)
    return lhs, rhs


def lln_error(graph: Graph, zeta: Field, f0: ParticleState, scale: float, t: float, replicas: int, seed: int,
              dt: float = WaveGraphConstants.DEFAULT_DT, workers: Optional[int] = 1) -> McEstimate:
    """McEstimate of E||f_t/c - g_t||_2^2 where g solves the ODE from zeta.

    The bound is :func:`~wavegraph.analysis.bounds.lln_error_bound`.
    """
    _check_replicas(replicas)
    _check_time(t)
    _require_finite(graph, "lln_error")
    if not scale > 0:
        raise EstimatorError(f"Scale must be positive, got {scale}")
    batch = run_replicas(f0, [t], replicas, seed, workers=workers)
    g_nodes, g_edges = as_arrays(solve_ibvp(graph, zeta, t, dt).at(t))
    diff_nodes = batch.nodes[:, 0] / scale - g_nodes
    diff_edges = batch.edges[:, 0] / scale - g_edges
    samples = batch_energies(graph, diff_nodes, diff_edges)
    return McEstimate.from_samples(samples, seed, lln_error_bound(zeta, f0, scale, t))


@dataclass(frozen=True)
class DominanceCheck:
    """Jump counts of the particle system against the dominating Yule process."""

    ips_jumps: McEstimate
    yule_jumps: McEstimate
    start: int
    rate: float
    bound: float


def jump_count_dominance(graph: Graph, f0: ParticleState, t: float, replicas: int, seed: int,
                         workers: Optional[int] = 1) -> DominanceCheck:
    """Compare E eta_t with the Yule process at rate M*d started from r.

    r is the smallest integer with r >= ||f||_1/(M*d); ``bound`` is
    ``(||f||_1/(M*d) + 1) exp(M*d*t)``.
    """
    _check_replicas(replicas)
    _check_time(t)
    batch = run_replicas(f0, [t], replicas, seed, watch=[] if graph.is_finite else [graph.node_id(0)],
                         workers=workers)
    ips = McEstimate.from_samples(batch.jumps[:, 0], seed)
    Md = graph.constants.Md
    r = dominance_start(f0)
    # Yule replicas draw from seed + 1
    yule = McEstimate.from_samples(yule_counts(Md, r, t, replicas, seed + 1), seed + 1)
    return DominanceCheck(ips_jumps=ips, yule_jumps=yule, start=r, rate=Md,
                          bound=jump_count_bound(f0, t))
