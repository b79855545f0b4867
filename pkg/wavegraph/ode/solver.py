"""Deterministic solver for dv/dt = L_G v with a Dirichlet mask.

The system is integrated with the implicit midpoint rule on a uniform time
grid. ``L_G`` is skew-adjoint under the weighted inner product, so the
scheme keeps ``||v_t||_2`` constant up to the linear-solve residual.
"""

import math
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.integrate import cumulative_trapezoid
from scipy.sparse.linalg import gmres

from ..core.constants import WaveGraphConstants
from ..graph.fields import Field, as_arrays
from ..graph.graph import FiniteGraph, Graph, NodeValues
from ..graph.operators import operator_matrix, weight_vector
from ..utils.exceptions import FieldError, SolverError
from .periodic import PeriodicData


def make_zeta(graph: FiniteGraph, phi: NodeValues, psi: Optional[NodeValues] = None) -> Field:
    """Initial data of the first-order system.

    Node values are ``m_x * psi(x)``; edge coefficients are
    ``phi(head) - phi(tail)``.

    Raises:
        FieldError: If psi is nonzero on a V_1 node
    """
    if not graph.is_finite:
        raise FieldError("Initial data can only be assembled on a finite graph")
    phi_values = graph.node_array(phi)
    psi_values = graph.node_array(psi)
    bad = np.flatnonzero(graph.fixed & (psi_values != 0))
    if len(bad):
        raise FieldError(
            f"psi must vanish on V_1, but psi({graph.node_id(bad[0])!r}) = {psi_values[bad[0]]}",
            {"node": str(graph.node_id(bad[0]))},
        )
    return Field(graph, graph.mass * psi_values, phi_values[graph.head] - phi_values[graph.tail])


def periodic_zeta(graph: FiniteGraph, data: PeriodicData) -> Field:
    """make_zeta with phi, psi taken from Fourier data at the node coordinates."""
    x = graph.coords[:, 0]
    return make_zeta(graph, data.phi(x), data.psi(x))


class OdeSolution:
    """Solution snapshots on a uniform time grid.

    Attributes:
        graph: Graph the solution lives on
        times: Grid times 0, dt, ..., T
        values: (len(times), |V|+|E|) stacked node/edge values
        dt: Grid step
    """

    def __init__(self, graph: FiniteGraph, times: np.ndarray, values: np.ndarray, iterations: int = 0):
        self.graph = graph
        self.times = times
        self.values = values
        self.dt = float(times[1] - times[0]) if len(times) > 1 else 0.0
        self.iterations = iterations
        self._integrals: Optional[np.ndarray] = None

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def zeta(self) -> Field:
        return self.field(0)

    @property
    def node_values(self) -> np.ndarray:
        return self.values[:, :self.graph.node_count]

    @property
    def edge_values(self) -> np.ndarray:
        return self.values[:, self.graph.node_count:]

    def index(self, t: float) -> int:
        """Grid index of time t.

        Raises:
            SolverError: If t is outside [0, T] or off the grid
        """
        tol = WaveGraphConstants.GRID_TOLERANCE * max(1.0, self.T)
        if t < -tol or t > self.T + tol:
            raise SolverError(f"Time {t} is outside the solution interval [0, {self.T}]", details={"t": t})
        if self.dt == 0.0:
            return 0
        k = int(round(t / self.dt))
        if abs(k * self.dt - t) > tol:
            raise SolverError(f"Time {t} is not on the solution grid (dt={self.dt})", details={"t": t})
        return min(k, len(self.times) - 1)

    def field(self, k: int) -> Field:
        V = self.graph.node_count
        return Field(self.graph, self.values[k, :V].copy(), self.values[k, V:].copy())

    def at(self, t: float) -> Field:
        """Solution field at grid time t."""
        return self.field(self.index(t))

    def energies(self) -> np.ndarray:
        """||v_t||_2^2 at every grid time."""
        return (self.values ** 2) @ weight_vector(self.graph)

    def node_integrals(self) -> np.ndarray:
        """Trapezoid integrals of the node values from 0 to every grid time."""
        if self._integrals is None:
            if len(self.times) == 1:
                self._integrals = np.zeros((1, self.graph.node_count))
            else:
                self._integrals = cumulative_trapezoid(self.node_values, self.times, axis=0, initial=0.0)
        return self._integrals

    def to_frame(self) -> pd.DataFrame:
        """Long-format table with columns t, kind, id, value."""
        graph = self.graph
        V, E = graph.node_count, graph.edge_count
        ids = [graph.node_label(i) for i in range(V)] + [graph.edge_label(e) for e in range(E)]
        kinds = ["node"] * V + ["edge"] * E
        K = len(self.times)
        return pd.DataFrame({
            "t": np.repeat(self.times, V + E),
            "kind": np.tile(kinds, K),
            "id": np.tile(ids, K),
            "value": self.values.reshape(-1),
        })

    def write_csv(self, path: Union[str, Path], every: int = 1) -> Path:
        """Write snapshots (every ``every``-th grid time) as CSV."""
        path = Path(path)
        frame = self.to_frame()
        if every > 1:
            stride = self.graph.node_count + self.graph.edge_count
            keep = (np.arange(len(frame)) // stride) % every == 0
            frame = frame[keep]
        frame.to_csv(path, index=False, float_format="%.17g")
        return path

    def __repr__(self) -> str:
        return f"OdeSolution(T={self.T}, dt={self.dt}, steps={len(self.times) - 1})"


def solve_ibvp(graph: Graph, zeta: Any, T: float, dt: float = WaveGraphConstants.DEFAULT_DT) -> OdeSolution:
    """Integrate dv/dt = L~ v from v_0 = zeta up to time T.

    ``L~`` is L_G with the node rows of V_1 set to zero, so V_1 node values
    keep their initial value. Each step solves
    ``(I - dt/2 L~) v_{k+1} = (I + dt/2 L~) v_k`` by restarted GMRES,
    warm-started from ``v_k``. The step is shrunk so that T/dt is an integer.

    Args:
        graph: Finite graph
        zeta: Initial Field or ParticleState
        T: Final time, T >= 0
        dt: Requested time step, dt > 0

    Returns:
        OdeSolution with snapshots at every grid time

    Raises:
        SolverError: For dt <= 0, T < 0, lazy graphs or a non-convergent solve
    """
    if not dt > 0:
        raise SolverError(f"Time step must be positive, got {dt}", details={"dt": dt})
    if not T >= 0:
        raise SolverError(f"Final time must be non-negative, got {T}", details={"T": T})
    if not graph.is_finite:
        raise SolverError("The ODE solver requires a finite graph; truncate lazy graphs first")
    if zeta.graph is not graph:
        raise SolverError("Initial data lives on a different graph")

    steps = 0 if T == 0 else max(1, math.ceil(T / dt - WaveGraphConstants.GRID_TOLERANCE))
    times = np.linspace(0.0, T, steps + 1)
    nodes, edges = as_arrays(zeta)
    values = np.empty((steps + 1, graph.node_count + graph.edge_count))
    values[0] = np.concatenate([nodes, edges])
    if steps == 0:
        return OdeSolution(graph, times, values)

    h = T / steps
    L = operator_matrix(graph, mask_fixed=True)
    identity = sp.identity(L.shape[0], format="csr")
    lhs = (identity - 0.5 * h * L).tocsr()
    rhs = (identity + 0.5 * h * L).tocsr()
    restart = WaveGraphConstants.GMRES_RESTART
    max_cycles = max(1, WaveGraphConstants.GMRES_MAX_ITERATIONS // restart)

    total_iterations = 0
    for k in range(steps):
        b = rhs @ values[k]
        b_norm = np.linalg.norm(b)
        if b_norm == 0.0:
            values[k + 1] = 0.0
            continue
        counter = _IterationCounter()
        x, info = gmres(lhs, b, x0=values[k], rtol=WaveGraphConstants.GMRES_TOLERANCE, atol=0.0,
                        restart=restart, maxiter=max_cycles, callback=counter, callback_type="pr_norm")
        total_iterations += counter.count
        if info != 0:
            residual = float(np.linalg.norm(lhs @ x - b) / b_norm)
            raise SolverError(
                f"Linear solve did not converge at step {k + 1} (relative residual {residual:.3e})",
                iterations=counter.count,
                details={"step": k + 1, "residual": residual},
            )
        values[k + 1] = x
    return OdeSolution(graph, times, values, iterations=total_iterations)


def solve_at(graph: Graph, zeta: Any, times: Sequence[float],
             dt: float = WaveGraphConstants.DEFAULT_DT) -> List[Field]:
    """Solution fields at arbitrary, possibly off-grid, times.

    Times are visited in increasing order. Each segment between consecutive
    times is its own solve_ibvp call started from the previous endpoint, so
    every requested time is a grid end point.

    Returns:
        One Field per entry of ``times``, in the given order

    Raises:
        SolverError: As solve_ibvp, or for a negative time
    """
    if zeta.graph is not graph:
        raise SolverError("Initial data lives on a different graph")
    nodes, edges = as_arrays(zeta)
    current = Field(graph, nodes, edges)
    elapsed = 0.0
    fields: List[Optional[Field]] = [None] * len(times)
    for k in sorted(range(len(times)), key=lambda j: float(times[j])):
        t = float(times[k])
        if not t >= 0:
            raise SolverError(f"Final time must be non-negative, got {t}", details={"T": t})
        if t > elapsed:
            segment = solve_ibvp(graph, current, t - elapsed, dt)
            current = segment.field(len(segment.times) - 1)
            elapsed = t
        fields[k] = current
    return fields


class _IterationCounter:
    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def __call__(self, _residual):
        self.count += 1


def reconstruct_displacement(phi: NodeValues, sol: OdeSolution, x, t: float) -> float:
    """Displacement u(x, t) = phi(x) + (1/m_x) * int_0^t v(x, s) ds.

    The time integral is the trapezoid rule on the solution grid.

    Raises:
        SolverError: If t is beyond the solved interval or off the grid
    """
    graph = sol.graph
    i = graph.node_index(x)
    k = sol.index(t)
    phi_x = float(graph.node_array(phi)[i])
    return phi_x + float(sol.node_integrals()[k, i]) / graph.node_mass(i)


def reconstruct_all(phi: NodeValues, sol: OdeSolution, t: float) -> np.ndarray:
    """Displacement at every node at grid time t."""
    graph = sol.graph
    k = sol.index(t)
    return graph.node_array(phi) + sol.node_integrals()[k] / graph.mass
