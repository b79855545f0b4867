"""Closed-form L^2 bounds for the particle system."""

import math
from typing import Any, Optional

from ..graph.fields import Field, as_arrays
from ..graph.operators import norm_alpha, norm_sq
from ..utils.exceptions import EstimatorError


def lln_bound(f: Any, t: float) -> float:
    """Dimension-free bound on E||f_t - E f_t||_2^2.

    ``M*d*t*||f||_1 + (||f||_1 + M*d) * exp(M*d*t)``
    """
    Md = f.graph.constants.Md
    l1 = norm_alpha(f, 1)
    return Md * t * l1 + (l1 + Md) * math.exp(Md * t)


def finite_bound(f: Any, t: float, A: Optional[float] = None) -> float:
    """Finite-graph bound ``||f||_2^2 * (exp(A*t/||f||_2) - 1)``; 0 when f = 0.

    Raises:
        EstimatorError: If A is not given and the graph is not finite
    """
    if A is None:
        A = f.graph.constants.A
        if A is None:
            raise EstimatorError("The finite-graph bound needs a finite graph (constant A)")
    energy = norm_sq(f)
    if energy == 0.0:
        return 0.0
    return energy * math.expm1(A * t / math.sqrt(energy))


def _bias(zeta: Any, f0: Any, scale: float) -> float:
    z_nodes, z_edges = as_arrays(zeta)
    f_nodes, f_edges = as_arrays(f0)
    return norm_sq(Field(zeta.graph, z_nodes - f_nodes / scale, z_edges - f_edges / scale))


def lln_error_bound(zeta: Any, f0: Any, scale: float, t: float) -> float:
    """Bound on E||f_t/c - g_t||_2^2 for the rescaled process, any graph.

    ``||zeta - f0/c||^2 + (M*d*t*||f0||_1 + (||f0||_1 + M*d) e^{M*d*t}) / c^2``
    """
    if not scale > 0:
        raise EstimatorError(f"Scale must be positive, got {scale}")
    return _bias(zeta, f0, scale) + lln_bound(f0, t) / scale ** 2


def finite_lln_error_bound(zeta: Any, f0: Any, scale: float, t: float) -> float:
    """Finite-graph version: ``||zeta - f0/c||^2 + finite_bound(f0, t) / c^2``."""
    if not scale > 0:
        raise EstimatorError(f"Scale must be positive, got {scale}")
    return _bias(zeta, f0, scale) + finite_bound(f0, t) / scale ** 2


def dominance_start(f: Any) -> int:
    """Smallest integer r >= ||f||_1 / (M*d), at least 1."""
    return max(1, math.ceil(norm_alpha(f, 1) / f.graph.constants.Md - 1e-12))


def jump_count_bound(f: Any, t: float) -> float:
    """Upper bound ``(||f||_1/(M*d) + 1) * exp(M*d*t)`` on E eta_t."""
    Md = f.graph.constants.Md
    return (norm_alpha(f, 1) / Md + 1.0) * math.exp(Md * t)
