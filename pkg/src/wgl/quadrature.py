"""Uniform time quadrature with a built-in refinement check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterOutOfRange


@dataclass(frozen=True)
class QuadratureSpec:
    """Trapezoidal rule on ``[t0, t0 + T]`` with step ``dt``.

    Every sweep samples the finer grid ``dt / refine`` once; the coarse
    trapezoid sum reuses every ``refine``-th sample, so the refinement error
    estimate costs no extra evaluations.
    """

    T: float
    dt: float
    t0: float = 0.0
    refine: int = 2

    def __post_init__(self):
        if not (self.T > 0 and self.dt > 0):
            raise ValueError("T and dt must be positive")
        if int(self.refine) != self.refine or self.refine < 2:
            raise ValueError("refine must be an integer >= 2")
        n = self.T / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ValueError(f"T/dt = {n} is not an integer")

    @classmethod
    def for_band(cls, T: float, band: float, t0: float = 0.0, factor: float = 8.0,
                 min_steps: int = 16, refine: int = 2) -> "QuadratureSpec":
        """Default step ``1/(factor * band^2)`` rounded so that it divides ``T``.

        When ``T`` is an integer the step also divides 1, which lets periodic
        torus factors reuse one period of samples.
        """
        band = max(float(band), 1e-12)
        per_unit = math.ceil(factor * band * band - 1e-9)
        n = max(math.ceil(T * per_unit - 1e-9), int(min_steps))
        return cls(float(T), float(T) / n, float(t0), refine)

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))

    def check_band(self, band: float) -> None:
        if self.dt * band * band > 0.25 + 1e-12:
            raise ParameterOutOfRange(
                f"dt * band^2 = {self.dt * band * band:.3g} exceeds 1/4 (band {band})"
            )

    def fine_times(self) -> np.ndarray:
        n = self.steps * self.refine
        return self.t0 + np.arange(n + 1) * (self.T / n)

    def fine_weights(self) -> np.ndarray:
        n = self.steps * self.refine
        w = np.full(n + 1, self.T / n)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def coarse_weights(self) -> np.ndarray:
        """Trapezoid weights at ``dt`` expressed on the fine sample index."""
        n = self.steps * self.refine
        w = np.zeros(n + 1)
        w[:: self.refine] = self.dt
        w[0] *= 0.5
        w[-1] *= 0.5
        return w
