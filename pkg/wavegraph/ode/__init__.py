"""Deterministic wave solvers."""

from .periodic import FourierSeries, PeriodicData, dalembert
from .solver import (
    OdeSolution,
    make_zeta,
    periodic_zeta,
    reconstruct_all,
    reconstruct_displacement,
    solve_at,
    solve_ibvp,
)

__all__ = [
    "FourierSeries",
    "PeriodicData",
    "dalembert",
    "OdeSolution",
    "make_zeta",
    "periodic_zeta",
    "reconstruct_all",
    "reconstruct_displacement",
    "solve_at",
    "solve_ibvp",
]
