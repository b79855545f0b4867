"""Core module initialization."""

from .constants import WaveGraphConstants
from .config import ExperimentConfig, KINDS, canonical_kind, load_preset, parse_override
from .experiment import ExperimentRunner

__all__ = [
    "WaveGraphConstants",
    "ExperimentConfig",
    "ExperimentRunner",
    "KINDS",
    "canonical_kind",
    "load_preset",
    "parse_override",
]
