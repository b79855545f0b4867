"""Utility modules for wavegraph."""

from .exceptions import (
    WaveGraphError,
    GraphError,
    FieldError,
    SolverError,
    SimulationError,
    EstimatorError,
    ConfigurationError,
    RoundingWarning,
)
from .parallel import ReplicaPool, default_workers, replica_rng

__all__ = [
    "WaveGraphError",
    "GraphError",
    "FieldError",
    "SolverError",
    "SimulationError",
    "EstimatorError",
    "ConfigurationError",
    "RoundingWarning",
    "ReplicaPool",
    "default_workers",
    "replica_rng",
]
