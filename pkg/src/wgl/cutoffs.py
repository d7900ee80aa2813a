"""Smooth cutoff functions used by projectors, multipliers and kernels."""

from __future__ import annotations

import numpy as np


def _f(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def chi(x):
    """Smooth cutoff equal to 1 on [-1, 1] and 0 outside [-2, 2].

    Built from ``f(t) = exp(-1/t)`` as ``f(2-|x|) / (f(2-|x|) + f(|x|-1))``,
    so the transition on ``1 < |x| < 2`` is symmetric about ``|x| = 3/2`` and
    the integral of ``chi`` over the line is exactly 3.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    a = _f(2.0 - ax)
    b = _f(ax - 1.0)
    den = a + b
    out = np.zeros_like(ax)
    inside = ax <= 1.0
    out[inside] = 1.0
    mid = (~inside) & (ax < 2.0)
    out[mid] = a[mid] / den[mid]
    return out


def chi_box(x, lo, hi):
    """``chi`` rescaled so that it equals 1 exactly on ``[lo, hi]``."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    return chi((np.asarray(x, dtype=float) - c) / h)


def smoothstep5(x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0)


def dn_symbol(y, s):
    """Radial symbol ``g`` of the multiplier D_N, evaluated at ``|y|``.

    ``g = 1`` for ``|y| <= 1`` and ``|y|**(s-1)`` for ``|y| >= 2``; in between
    ``exp(theta(|y|-1) * (s-1) * log|y|)`` with ``theta`` the quintic smoothstep.
    """
    ay = np.abs(np.asarray(y, dtype=float))
    logy = np.log(np.maximum(ay, 1.0))
    return np.exp(smoothstep5(ay - 1.0) * (s - 1.0) * logy)


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


class PsiWindow:
    """Time window ``psi = c * (eta * eta)`` with ``eta`` an even bump on [-1, 1].

    ``psi`` is supported in [-2, 2], its Fourier transform ``c * eta_hat**2``
    is nonnegative, and ``c`` is fixed so that ``min(psi on [-1, 1]) = 1.01``.
    The autocorrelation is tabulated once and interpolated.
    """

    def __init__(self, n: int = 8001, floor: float = 1.01):
        u = np.linspace(-1.0, 1.0, n)
        h = u[1] - u[0]
        eta = _bump(u)
        conv = np.convolve(eta, eta) * h
        self._grid = np.linspace(-2.0, 2.0, conv.size)
        raw = conv
        # psi decreases in |t|, so its minimum over [-1, 1] sits at t = +-1
        at_one = np.interp(1.0, self._grid, raw)
        self.scale = floor / at_one
        self._vals = raw * self.scale
        self.max = float(self._vals.max())

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, self._grid, self._vals, left=0.0, right=0.0)


psi = PsiWindow()
