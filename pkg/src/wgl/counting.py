"""Lattice points on circles and the measure of thin shells in R x Z^2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

__all__ = [
    "CountRecord",
    "circle_count",
    "r2_table",
    "max_circle_count",
    "x_measure",
    "measure_sum",
    "annulus_measure",
    "shell_measure_bruteforce",
    "MeasureRecord",
    "measure_sweep",
]


@dataclass(frozen=True)
class CountRecord:
    A: int
    r2: int


def _chi4(d: int) -> int:
    return 0 if d % 2 == 0 else (1 if d % 4 == 1 else -1)


def _r2_divisor(A: int) -> int:
    # r2(A) = 4 * sum_{d | A} chi_4(d)
    if A == 0:
        return 1
    s = 0
    r = math.isqrt(A)
    for d in range(1, r + 1):
        if A % d == 0:
            e = A // d
            s += _chi4(d)
            if e != d:
                s += _chi4(e)
    return 4 * s


def _r2_loop(A: int) -> int:
    if A == 0:
        return 1
    r = math.isqrt(A)
    c = 0
    for x in range(-r, r + 1):
        y2 = A - x * x
        y = math.isqrt(y2)
        if y * y == y2:
            c += 1 if y == 0 else 2
    return c


def circle_count(A: int, method: str = "divisor") -> int:
    """Number of ``(x, y)`` in Z^2 with ``x^2 + y^2 = A``.

    ``method`` is ``"divisor"`` (Jacobi's formula) or ``"loop"`` (bounded
    enumeration).
    """
    A = int(A)
    if A < 0:
        raise ValueError("A must be nonnegative")
    if method == "divisor":
        return _r2_divisor(A)
    if method == "loop":
        return _r2_loop(A)
    raise ValueError(f"unknown method {method!r}")


def r2_table(amax: int, method: str = "loop") -> np.ndarray:
    """``r2(A)`` for ``0 <= A <= amax``.

    ``"loop"`` counts lattice points directly; ``"divisor"`` sieves
    ``4 * sum_{d | A} chi_4(d)`` over odd ``d``.
    """
    amax = int(amax)
    if method == "loop":
        return np.asarray(kernels.r2_bruteforce(amax), dtype=np.int64)
    if method != "divisor":
        raise ValueError(f"unknown method {method!r}")
    acc = np.zeros(amax + 1, dtype=np.int64)
    for d in range(1, amax + 1, 2):
        acc[d::d] += 1 if d % 4 == 1 else -1
    out = 4 * acc
    out[0] = 1
    return out


def max_circle_count(N: int, eps=(0.2, 0.3)) -> dict:
    """Largest ``r2(A)`` over ``0 <= A <= 4 N^2``, with ``A^eps`` reference values."""
    if N > 2**12:
        raise ValueError("N must be at most 4096")
    amax = 4 * int(N) * int(N)
    tab = r2_table(amax)
    a = int(np.argmax(tab))
    return {
        "N": int(N),
        "A": a,
        "r2": int(tab[a]),
        "reference": {float(e): float(amax) ** e for e in eps},
    }


def x_measure(A: float, C: float, T: float, N: float):
    """Length of ``{xi : ||xi|^2 - A - C| <= 1/T, |xi| <= 2N}`` on the line.

    Vectorized over ``A``.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    s = np.asarray(A, dtype=float) + C
    hi = np.sqrt(np.clip(np.minimum(s + 1.0 / T, 4.0 * N * N), 0.0, None))
    lo = np.sqrt(np.clip(s - 1.0 / T, 0.0, None))
    out = 2.0 * np.clip(hi - lo, 0.0, None)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MeasureRecord:
    C: float
    T: float
    N: float
    value: float
    bound: float
    ratio: float


def measure_sum(C: float, T: float, N: int) -> MeasureRecord:
    """``sum_{0 <= A <= 4N^2} |X_A|`` and its ratio to ``T^(-1/2) + N/T``."""
    if abs(C) > 4 * N * N:
        raise ValueError("need |C| <= 4 N^2")
    A = np.arange(0, 4 * int(N) * int(N) + 1)
    v = float(np.sum(x_measure(A, C, T, N)))
    b = T**-0.5 + N / T
    return MeasureRecord(float(C), float(T), float(N), v, b, v / b)


def annulus_measure(C: float, T: float, N: int, table: np.ndarray | None = None) -> float:
    """Measure of ``{(xi1, k) in R x Z^2 : ||xi|^2 - C| <= 1/T, |xi1| <= 2N, |k|^2 <= 4N^2}``.

    Each torus shell ``|k|^2 = A`` carries ``r2(A)`` lattice points and a line
    interval of length ``x_measure(-A, C, T, N)``.
    """
    amax = 4 * int(N) * int(N)
    tab = r2_table(amax) if table is None else table[: amax + 1]
    A = np.arange(amax + 1)
    return float(np.sum(tab * x_measure(-A.astype(float), C, T, N)))


def shell_measure_bruteforce(C: float, T: float, N: int, samples: int = 200001) -> float:
    """Grid estimate of ``annulus_measure`` by enumerating lattice points directly."""
    xi = np.linspace(-2.0 * N, 2.0 * N, samples)
    h = xi[1] - xi[0]
    total = 0.0
    r = 2 * int(N)
    ks = np.arange(-r, r + 1)
    k2 = np.add.outer(ks * ks, ks * ks).ravel()
    k2 = k2[k2 <= 4 * N * N]
    vals, mult = np.unique(k2, return_counts=True)
    x2 = xi * xi
    for a, c in zip(vals, mult):
        inside = np.abs(x2 + a - C) <= 1.0 / T
        total += c * inside.sum() * h
    return float(total)


SWEEP_T = (1, 4, 16, 64, 256)
SWEEP_N = (8, 16, 32, 64)


def measure_sweep(Ts=SWEEP_T, Ns=SWEEP_N) -> list:
    """``measure_sum`` over ``Ts x Ns`` and ``C`` in ``[-4N^2, 4N^2]`` with step ``N``."""
    out = []
    for T in Ts:
        for N in Ns:
            for C in range(-4 * N * N, 4 * N * N + 1, N):
                out.append(measure_sum(C, T, N))
    return out
