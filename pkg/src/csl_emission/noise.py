"""Noise time-correlation functions and their spectra.

Every model is normalized to unit area, so its spectrum is one at zero
frequency.  White noise is kept as an algebraic tag: integrals against a
delta correlation are done analytically with the half-weight endpoint
convention ``int_0^t delta(x) g(x) dx = g(0)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._quad import panel_rule

__all__ = [
    "NoiseModel",
    "White",
    "ExponentialOU",
    "GaussianCorr",
    "Mixture",
    "PointwiseDeltaError",
    "correlation",
    "spectrum",
    "make_noise",
    "mixture",
    "NOISE_KINDS",
]

# Beyond this many e-folds the correlation tail is dropped from x-integrals.
_TAIL_EFOLDS = 40.0
_NODES_PER_PANEL = 16


class PointwiseDeltaError(ValueError):
    """Raised when a white-noise (delta) correlation is evaluated pointwise."""


class NoiseModel:
    """Base class.  Subclasses are frozen dataclasses."""

    kind: str = ""

    def correlation(self, s):
        raise NotImplementedError

    def spectrum(self, omega):
        raise NotImplementedError

    def scaled(self, t_unit: float) -> "NoiseModel":
        """Same model with times measured in units of ``t_unit``."""
        raise NotImplementedError

    def integrate(self, func: Callable, t: float, *, phase_rate: float = 0.0,
                  growth: float = 0.0) -> complex:
        """Return ``int_0^t f(x) func(x) dx``.

        ``func`` must accept a numpy array.  ``phase_rate`` is the fastest
        angular frequency present in ``func`` and ``growth`` the largest
        exponential growth rate; both steer the panel layout.
        """
        raise NotImplementedError


@dataclass(frozen=True)
class White(NoiseModel):
    kind = "White"

    def correlation(self, s):
        raise PointwiseDeltaError(
            "white noise has a delta correlation; it is never evaluated "
            "pointwise. Integrals against it are handled analytically."
        )

    def spectrum(self, omega):
        return np.ones_like(np.asarray(omega, dtype=float))[()] + 0.0

    def scaled(self, t_unit):
        return self

    def integrate(self, func, t, *, phase_rate=0.0, growth=0.0):
        if t <= 0:
            return 0.0
        return 0.5 * complex(np.asarray(func(np.zeros(1)))[0])


@dataclass(frozen=True)
class _Colored(NoiseModel):
    tau: float

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"{self.kind} needs a positive correlation time, got {self.tau!r}")

    def scaled(self, t_unit):
        return type(self)(self.tau / t_unit)

    def _cutoff(self, growth: float) -> float:
        raise NotImplementedError

    def integrate(self, func, t, *, phase_rate=0.0, growth=0.0):
        if t <= 0:
            return 0.0
        upper = min(t, self._cutoff(max(growth, 0.0)))
        h = self.tau
        if phase_rate > 0:
            h = min(h, 2.0 * math.pi / abs(phase_rate) / 8.0)
        if growth > 0:
            h = min(h, 1.0 / growth)
        x, w = panel_rule(0.0, upper, h, _NODES_PER_PANEL)
        return complex(np.sum(w * self.correlation(x) * func(x)))


@dataclass(frozen=True)
class ExponentialOU(_Colored):
    """Ornstein-Uhlenbeck correlation ``exp(-|s|/tau) / (2 tau)``."""

    tau: float
    kind = "ExponentialOU"

    def correlation(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        return np.exp(-s / self.tau) / (2.0 * self.tau)

    def spectrum(self, omega):
        omega = np.asarray(omega, dtype=float)
        return (1.0 / (1.0 + (omega * self.tau) ** 2))[()]

    def _cutoff(self, growth):
        decay = 1.0 / self.tau - growth
        if decay <= 0:
            return math.inf
        return _TAIL_EFOLDS / decay


@dataclass(frozen=True)
class GaussianCorr(_Colored):
    """Gaussian correlation ``exp(-s^2/(2 tau^2)) / (sqrt(2 pi) tau)``."""

    tau: float
    kind = "GaussianCorr"

    def correlation(self, s):
        s = np.asarray(s, dtype=float)
        return np.exp(-0.5 * (s / self.tau) ** 2) / (math.sqrt(2.0 * math.pi) * self.tau)

    def spectrum(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.exp(-0.5 * (omega * self.tau) ** 2)[()]

    def _cutoff(self, growth):
        # solve x^2/(2 tau^2) - growth x = efolds
        t2 = self.tau**2
        return t2 * growth + math.sqrt((t2 * growth) ** 2 + 2.0 * _TAIL_EFOLDS * t2)


@dataclass(frozen=True)
class Mixture(NoiseModel):
    """Convex combination of unit-area models; still unit area."""

    weights: tuple
    components: tuple
    kind = "Mixture"

    def __post_init__(self):
        if len(self.weights) != len(self.components) or not self.components:
            raise ValueError("Mixture needs one weight per component")
        if any(w < 0 for w in self.weights) or not math.isclose(sum(self.weights), 1.0):
            raise ValueError("Mixture weights must be nonnegative and sum to one")

    def correlation(self, s):
        return sum(w * c.correlation(s) for w, c in zip(self.weights, self.components))

    def spectrum(self, omega):
        return sum(w * c.spectrum(omega) for w, c in zip(self.weights, self.components))

    def scaled(self, t_unit):
        return Mixture(self.weights, tuple(c.scaled(t_unit) for c in self.components))

    def integrate(self, func, t, *, phase_rate=0.0, growth=0.0):
        return sum(
            w * c.integrate(func, t, phase_rate=phase_rate, growth=growth)
            for w, c in zip(self.weights, self.components)
        )


NOISE_KINDS = {"White": White, "ExponentialOU": ExponentialOU, "GaussianCorr": GaussianCorr}


def make_noise(kind: str, tau: float | None = None) -> NoiseModel:
    """Build a model from its config name; ``tau`` is ignored for White."""
    try:
        cls = NOISE_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown noise kind {kind!r}; expected one of {sorted(NOISE_KINDS)}") from None
    if cls is White:
        return White()
    if tau is None:
        raise ValueError(f"noise kind {kind} requires tau")
    return cls(float(tau))


def mixture(weights: Sequence[float], components: Sequence[NoiseModel]) -> Mixture:
    return Mixture(tuple(float(w) for w in weights), tuple(components))


def correlation(model: NoiseModel, s):
    """Correlation density f(s) [1/time]; even in ``s``."""
    return model.correlation(s)


def spectrum(model: NoiseModel, omega):
    """Fourier transform of the correlation, ``int f(s) exp(i omega s) ds``."""
    return model.spectrum(omega)
