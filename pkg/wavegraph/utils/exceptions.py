"""Custom exception classes for wavegraph.

This module defines a hierarchy of exceptions so that callers (and the
command-line front end) can tell configuration mistakes apart from solver
or simulation failures.
"""

from typing import Optional, Dict, Any


class WaveGraphError(Exception):
    """Base exception for all wavegraph errors.

    All other wavegraph exceptions inherit from this base class,
    allowing for catch-all error handling when needed.
    """

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by the CLI error channel."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class GraphError(WaveGraphError):
    """Raised when a graph description is invalid.

    This includes duplicate edges, self-edges, non-positive masses or
    weights, unknown node ids and operations mixing fields of different
    graphs.
    """
    pass


class FieldError(WaveGraphError):
    """Raised when field or particle-state data is invalid.

    This includes non-integer particle values, support outside the graph
    and initial velocities that do not vanish on the fixed boundary.
    """
    pass


class SolverError(WaveGraphError):
    """Raised when the deterministic ODE solver fails.

    This includes non-positive time steps, linear solves that do not reach
    the requested residual and evaluation times outside the solution grid.
    """

    def __init__(self, message: str, iterations: Optional[int] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.iterations = iterations


class SimulationError(WaveGraphError):
    """Raised during particle-system simulation.

    This includes stepping an absorbing state, exceeding the jump-count
    circuit breaker and invariant violations detected in debug mode.
    """

    def __init__(self, message: str, jumps: Optional[int] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.jumps = jumps


class EstimatorError(WaveGraphError):
    """Raised when an estimator pre-condition does not hold.

    This includes too few replicas, initial states violating an estimator
    hypothesis and oracle state spaces beyond the enumeration cap.
    """
    pass


class ConfigurationError(WaveGraphError):
    """Raised when an experiment configuration is invalid or missing.

    This includes unknown experiment kinds, missing required settings,
    invalid values and unreadable configuration files.
    """
    pass


class RoundingWarning(UserWarning):
    """Issued when real-valued initial data is floored to particle counts."""
    pass
