"""Hydrodynamic-limit estimators on the periodic ring G_n.

Particle states on G_n are rescaled into piecewise-constant functions on
[0, 1): cell k = [k/n, (k+1)/n) carries ``v = f(k)/N`` and ``w = c_k/N``
where c_k is the coefficient of edge <k, k+1>. They are compared with the
d'Alembert solution in the L^2(0, 1) norm using 2-point Gauss-Legendre
quadrature per cell.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import roots_legendre

from ..core.constants import WaveGraphConstants
from ..graph.operators import norm_sq
from ..ips.engine import hydro_init
from ..ips.replicas import run_replicas
from ..ode.periodic import PeriodicData, dalembert
from ..ode.solver import solve_ibvp
from ..utils.exceptions import EstimatorError
from .estimators import McEstimate, _check_replicas, _check_time, batch_energies


@dataclass(frozen=True)
class HydroFields:
    """Rescaled cell values of one state at time t.

    Attributes:
        n: Ring size
        N: Particle scale
        t: Time
        v: (n,) or (R, n) node values f(k)/N
        w: (n,) or (R, n) edge values c_k/N
    """

    n: int
    N: int
    t: float
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def from_counts(cls, n: int, N: int, t: float, nodes: np.ndarray, edges: np.ndarray) -> "HydroFields":
        return cls(n, N, t, np.asarray(nodes, dtype=np.float64) / N, np.asarray(edges, dtype=np.float64) / N)

    def velocity(self, x) -> np.ndarray:
        """v^{n,N}(x, t) = f(floor(n x))/N."""
        cells = np.floor(np.mod(np.asarray(x, dtype=np.float64), 1.0) * self.n).astype(np.int64)
        return self.v[..., np.minimum(cells, self.n - 1)]

    def strain(self, x) -> np.ndarray:
        """w^{n,N}(x, t) = c_{floor(n x)}/N."""
        cells = np.floor(np.mod(np.asarray(x, dtype=np.float64), 1.0) * self.n).astype(np.int64)
        return self.w[..., np.minimum(cells, self.n - 1)]


@lru_cache(maxsize=None)
def cell_quadrature(n: int, points: int = WaveGraphConstants.GAUSS_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes (n, Q) and weights (Q,) for the cells of [0, 1)."""
    xi, weights = roots_legendre(points)
    x = (np.arange(n)[:, None] + 0.5 * (1.0 + xi[None, :])) / n
    return x, weights / (2.0 * n)


def _validate(n: int, N: int) -> None:
    if int(n) != n or n < 3:
        raise EstimatorError("ring requires n ≥ 3", {"n": n})
    if int(N) != N or N < 1:
        raise EstimatorError(f"Particle scale N must be a positive integer, got {N}", {"N": N})


def _cell_error(values: np.ndarray, exact: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # values (..., n), exact (n, Q)
    diff = values[..., :, None] - exact
    return np.sum(diff * diff * weights, axis=(-2, -1))


def hydro_error_samples(fields: HydroFields, data: PeriodicData) -> np.ndarray:
    """||v - u_t||_H^2 + ||w - u_x||_H^2 for every row of the fields."""
    x, weights = cell_quadrature(fields.n)
    _, u_t, u_x = dalembert(data, x, fields.t)
    return _cell_error(fields.v, u_t, weights) + _cell_error(fields.w, u_x, weights)


def _sample_ring(n: int, N: int, data: PeriodicData, times, replicas: int, seed: int, workers: Optional[int]):
    state = hydro_init(n, N, data)
    return state, run_replicas(state, times, replicas, seed, workers=workers)


def hydro_error(n: int, N: int, data: PeriodicData, t: float, replicas: int, seed: int,
                workers: Optional[int] = 1) -> McEstimate:
    """McEstimate of Err^{n,N}(t) = E||v - u_t||_H^2 + E||w - u_x||_H^2.

    Raises:
        EstimatorError: If n < 3, N < 1, R < 2 or t < 0
    """
    _validate(n, N)
    _check_replicas(replicas)
    _check_time(t)
    _, batch = _sample_ring(n, N, data, [t], replicas, seed, workers)
    fields = HydroFields.from_counts(n, N, t, batch.nodes[:, 0], batch.edges[:, 0])
    return McEstimate.from_samples(hydro_error_samples(fields, data), seed)


def weak_error(n: int, N: int, data: PeriodicData, t: float, frequency: int, replicas: int, seed: int,
               kind: str = "cos", workers: Optional[int] = 1) -> McEstimate:
    """McEstimate of E[v - u_t, eta_n]_H^2 for eta = cos or sin(2 pi l x).

    The test function is discretized as eta_n(x) = eta(floor(n x)/n).
    """
    _validate(n, N)
    _check_replicas(replicas)
    _check_time(t)
    if kind not in ("cos", "sin"):
        raise EstimatorError(f"Test function kind must be 'cos' or 'sin', got {kind!r}")
    eta = np.cos if kind == "cos" else np.sin
    eta_n = eta(2.0 * np.pi * frequency * np.arange(n) / n)
    _, batch = _sample_ring(n, N, data, [t], replicas, seed, workers)
    x, weights = cell_quadrature(n)
    _, u_t, _ = dalembert(data, x, t)
    exact_cells = np.sum(u_t * weights, axis=1)
    v = batch.nodes[:, 0].astype(np.float64) / N
    pairing = (v / n - exact_cells) @ eta_n
    return McEstimate.from_samples(pairing ** 2, seed)


@dataclass(frozen=True)
class HydroDecomposition:
    """Err^{n,N}(t) split into the ODE-mean bias and the scaled fluctuation."""

    bias: float
    fluctuation: McEstimate
    total: McEstimate

    @property
    def combined(self) -> float:
        return self.bias + self.fluctuation.estimate


def hydro_decomposition(n: int, N: int, data: PeriodicData, t: float, replicas: int, seed: int,
                        dt: float = WaveGraphConstants.DEFAULT_DT, workers: Optional[int] = 1) -> HydroDecomposition:
    """Compare Err^{n,N}(t) with bias + (n^2 N^2)^{-1} V(t).

    The bias uses the exact mean of f_t from the ODE solver; all three
    quantities come from the same replicas.
    """
    _validate(n, N)
    _check_replicas(replicas)
    _check_time(t)
    state, batch = _sample_ring(n, N, data, [t], replicas, seed, workers)
    graph = state.graph
    fields = HydroFields.from_counts(n, N, t, batch.nodes[:, 0], batch.edges[:, 0])
    total = McEstimate.from_samples(hydro_error_samples(fields, data), seed)

    mean = solve_ibvp(graph, state, t, dt).at(t)
    mean_fields = HydroFields.from_counts(n, N, t, mean.nodes, mean.edges)
    bias = float(hydro_error_samples(mean_fields, data))

    energies = batch_energies(graph, batch.nodes[:, 0], batch.edges[:, 0])
    scale = 1.0 / (n * n * N * N)
    fluct = McEstimate.from_samples(energies * scale, seed).shifted(-norm_sq(mean) * scale)
    return HydroDecomposition(bias=bias, fluctuation=fluct, total=total)


def displacement_error(n: int, N: int, data: PeriodicData, t: float, replicas: int, seed: int,
                       workers: Optional[int] = 1) -> McEstimate:
    """McEstimate of E||u^{n,N}(., t) - u(., t)||_H^2.

    ``u^{n,N}(x, t) = phi(x) + int_0^t v^{n,N}(x, s) ds`` with the exact
    pathwise time integral of the node counts.
    """
    _validate(n, N)
    _check_replicas(replicas)
    _check_time(t)
    _, batch = _sample_ring(n, N, data, [t], replicas, seed, workers)
    x, weights = cell_quadrature(n)
    u, _, _ = dalembert(data, x, t)
    phi = data.phi(x)
    integrals = batch.integrals[:, 0] / N
    diff = integrals[:, :, None] + (phi - u)[None, :, :]
    return McEstimate.from_samples(np.sum(diff * diff * weights, axis=(-2, -1)), seed)


def initial_energy_ratio(n: int, N: int, data: PeriodicData) -> Tuple[float, float]:
    """||f_0^{n,N}||_2^2 / (n^2 N^2) and its limit ||phi'||_H^2 + ||psi||_H^2."""
    _validate(n, N)
    state = hydro_init(n, N, data)
    return norm_sq(state) / (n * n * N * N), data.energy()


def initial_hydro_error(n: int, N: int, data: PeriodicData) -> float:
    """Err^{n,N}(0), a deterministic quantity."""
    _validate(n, N)
    state = hydro_init(n, N, data)
    fields = HydroFields.from_counts(n, N, 0.0, state.nodes, state.edges)
    return float(hydro_error_samples(fields, data))


SCALING_FAMILIES = ("supercritical", "critical", "subcritical")


def family_scale(family: str, n: int) -> int:
    """Particle scale N for a ring size n in one of the three regimes.

    supercritical: ceil(n^(3/2)) so N/n grows; critical: 2n so N/n is
    constant; subcritical: ceil(sqrt(n)) so N/n vanishes.
    """
    if family == "supercritical":
        return math.ceil(n ** 1.5 - 1e-9)
    if family == "critical":
        return 2 * n
    if family == "subcritical":
        return math.ceil(math.sqrt(n) - 1e-9)
    raise EstimatorError(f"Unknown scaling family {family!r}", {"families": list(SCALING_FAMILIES)})
