"""Interacting particle system module initialization."""

from .rate_tree import RateTree
from .state import ParticleState, init_state, state_from_field
from .engine import (
    EventRecord,
    Observer,
    SimulationSummary,
    hydro_init,
    simulate,
    step,
    write_trajectory,
)
from .kernels import simulate_kernel
from .replicas import ReplicaBatch, run_replicas
from .yule import yule_counts, yule_mean, yule_simulate

__all__ = [
    "RateTree",
    "ParticleState",
    "init_state",
    "state_from_field",
    "EventRecord",
    "Observer",
    "SimulationSummary",
    "hydro_init",
    "simulate",
    "step",
    "write_trajectory",
    "simulate_kernel",
    "ReplicaBatch",
    "run_replicas",
    "yule_counts",
    "yule_mean",
    "yule_simulate",
]
