"""Truncated Fourier data for the periodic 1-D wave problem.

Functions on [0, 1) are given as ``sum a*cos(2*pi*l*x) + b*sin(2*pi*l*x)``
over a list of ``(l, a, b)`` triples. The d'Alembert solution, its partial
derivatives and the H-norms used by the hydrodynamic estimators are all
evaluated in closed form from the coefficients.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from ..utils.exceptions import ConfigurationError


TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FourierSeries:
    """A real trigonometric polynomial of period 1."""

    frequencies: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    @classmethod
    def from_terms(cls, terms: Sequence[Sequence[float]]) -> "FourierSeries":
        l_values, a_values, b_values = [], [], []
        for term in terms or []:
            if len(term) != 3:
                raise ConfigurationError(f"Fourier term must be [l, a, b], got {term!r}")
            l, a, b = term
            if int(l) != l or l < 0:
                raise ConfigurationError(f"Fourier frequency must be a non-negative integer, got {l!r}")
            l_values.append(int(l))
            a_values.append(float(a))
            b_values.append(float(b))
        return cls(
            np.asarray(l_values, dtype=np.float64),
            np.asarray(a_values, dtype=np.float64),
            np.asarray(b_values, dtype=np.float64),
        )

    def to_terms(self) -> List[List[float]]:
        return [[int(l), float(a), float(b)]
                for l, a, b in zip(self.frequencies, self.cos_coeffs, self.sin_coeffs)]

    def _phase(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return TWO_PI * np.multiply.outer(x, self.frequencies)

    def __call__(self, x):
        theta = self._phase(x)
        return np.cos(theta) @ self.cos_coeffs + np.sin(theta) @ self.sin_coeffs

    def derivative(self, x):
        theta = self._phase(x)
        k = TWO_PI * self.frequencies
        return np.cos(theta) @ (k * self.sin_coeffs) - np.sin(theta) @ (k * self.cos_coeffs)

    def integral(self, lo, hi):
        """Exact integral over [lo, hi] (arrays broadcast)."""
        return self._antiderivative(hi) - self._antiderivative(lo)

    def _antiderivative(self, x):
        x = np.asarray(x, dtype=np.float64)
        constant = self.frequencies == 0
        k = TWO_PI * np.where(constant, 1.0, self.frequencies)
        theta = self._phase(x)
        waves = np.sin(theta) @ np.where(constant, 0.0, self.cos_coeffs / k) \
            - np.cos(theta) @ np.where(constant, 0.0, self.sin_coeffs / k)
        return waves + x * np.sum(np.where(constant, self.cos_coeffs, 0.0))

    def h_norm_sq(self) -> float:
        """Squared L^2(0,1) norm, from Parseval (terms with equal l are merged)."""
        total = 0.0
        merged: Dict[int, Tuple[float, float]] = {}
        for l, a, b in zip(self.frequencies, self.cos_coeffs, self.sin_coeffs):
            prev_a, prev_b = merged.get(int(l), (0.0, 0.0))
            merged[int(l)] = (prev_a + a, prev_b + b)
        for l, (a, b) in merged.items():
            total += a * a if l == 0 else 0.5 * (a * a + b * b)
        return float(total)

    def derivative_series(self) -> "FourierSeries":
        k = TWO_PI * self.frequencies
        return FourierSeries(self.frequencies.copy(), k * self.sin_coeffs, -k * self.cos_coeffs)

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.cos_coeffs) or np.any(self.sin_coeffs[self.frequencies > 0]))


@dataclass(frozen=True)
class PeriodicData:
    """Initial displacement phi and velocity psi of the periodic wave problem."""

    phi: FourierSeries = field(default_factory=lambda: FourierSeries.from_terms([]))
    psi: FourierSeries = field(default_factory=lambda: FourierSeries.from_terms([]))

    @classmethod
    def from_json(cls, data: Union[Mapping[str, Any], str, Path]) -> "PeriodicData":
        """Build from ``{"phi": [[l, a, b], ...], "psi": [[l, a, b], ...]}``.

        A string or path is read as a JSON file.
        """
        if isinstance(data, (str, Path)):
            try:
                with open(data) as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigurationError(f"Cannot read periodic data from {data}: {e}")
        if not isinstance(data, Mapping):
            raise ConfigurationError("Periodic data must be an object with 'phi' and 'psi'")
        unknown = set(data) - {"phi", "psi"}
        if unknown:
            raise ConfigurationError(f"Unknown periodic data keys: {sorted(unknown)}")
        return cls(FourierSeries.from_terms(data.get("phi", [])),
                   FourierSeries.from_terms(data.get("psi", [])))

    def to_json(self) -> Dict[str, List[List[float]]]:
        return {"phi": self.phi.to_terms(), "psi": self.psi.to_terms()}

    def energy(self) -> float:
        """||phi'||_H^2 + ||psi||_H^2."""
        return self.phi.derivative_series().h_norm_sq() + self.psi.h_norm_sq()

    @property
    def is_trivial(self) -> bool:
        """True when (phi')^2 + psi^2 vanishes identically."""
        return self.phi.derivative_series().is_zero and self.psi.is_zero


def dalembert(data: PeriodicData, x, t: float):
    """d'Alembert solution of u_tt = u_xx on the unit circle.

    Args:
        data: Initial displacement and velocity
        x: Position(s); periodic extension, any real values
        t: Time

    Returns:
        (u, u_t, u_x) evaluated at (x, t)
    """
    x = np.asarray(x, dtype=np.float64)
    right, left = x + t, x - t
    phi, psi = data.phi, data.psi
    u = 0.5 * (phi(right) + phi(left)) + 0.5 * psi.integral(left, right)
    u_t = 0.5 * (phi.derivative(right) - phi.derivative(left)) + 0.5 * (psi(right) + psi(left))
    u_x = 0.5 * (phi.derivative(right) + phi.derivative(left)) + 0.5 * (psi(right) - psi(left))
    return u, u_t, u_x
