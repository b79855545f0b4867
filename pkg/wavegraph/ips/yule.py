"""Yule (linear pure-birth) process used as a jump-count comparator.

Started from r individuals with per-capita birth rate lambda, the process
jumps from n to n+1 at rate n*lambda. :func:`yule_simulate` returns the
number of births up to T; the population ``r + births`` has mean
``r * exp(lambda * T)``.
"""

import math

import numpy as np

from ..utils.exceptions import SimulationError
from ..utils.parallel import replica_rng
from .kernels import yule_kernel


def _validate(lam: float, r: int, T: float) -> None:
    if not lam > 0:
        raise SimulationError(f"Yule rate must be positive, got {lam}")
    if int(r) != r or r < 1:
        raise SimulationError(f"Yule start must be a positive integer, got {r}")
    if not T >= 0:
        raise SimulationError(f"Yule horizon must be non-negative, got {T}")


def yule_simulate(lam: float, r: int, T: float, rng: np.random.Generator) -> int:
    """Number of births of a Yule process in [0, T].

    Waiting times are drawn sequentially with rates (r + k) * lambda.
    """
    _validate(lam, r, T)
    if T == 0:
        return 0
    return int(yule_kernel(float(lam), int(r), float(T), rng))


def yule_counts(lam: float, r: int, T: float, replicas: int, seed: int) -> np.ndarray:
    """Birth counts of independent replicas, one seeded stream each."""
    _validate(lam, r, T)
    return np.array([yule_simulate(lam, r, T, replica_rng(seed, i)) for i in range(replicas)], dtype=np.int64)


def yule_mean(lam: float, r: int, t: float) -> float:
    """Mean population r * exp(lambda * t)."""
    return r * math.exp(lam * t)
