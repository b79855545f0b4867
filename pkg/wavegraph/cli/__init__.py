"""CLI module initialization."""

from .commands import WaveGraphCLI

__all__ = [
    "WaveGraphCLI"
]
