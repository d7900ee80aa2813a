"""Explicit initial data that saturate the lower bounds for the Strichartz constant.

Three tensor-product families, labelled by their Fourier supports:

* ``phi1``: ``chi`` box ``[-N, N]`` in every direction (N-only growth);
* ``phi2``: ``chi`` box ``[0, T^(-1/2)]`` on the line, torus mode 0 only
  (T-only growth);
* ``phi3``: the ``phi2`` line factor times the torus box ``[0, N]``
  (mixed T and N growth).

Indicators are realized with the smooth cutoff of ``wgl.cutoffs`` rescaled to
the box, so each factor equals 1 on its box and vanishes outside the doubled
box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import SpectralField, WaveguideSpec, build_grid
from .cutoffs import chi_box
from .errors import DimensionError, ParameterOutOfRange
from .fitting import fit_power
from .norms import strichartz_ratio
from .separable import ProductField, RealLineFactor, TorusFactor

__all__ = [
    "ExtremizerFamily",
    "LowerBoundReport",
    "build_phi1",
    "build_phi2",
    "build_phi3",
    "build_family",
    "predicted_slopes",
    "ratio_sweep",
    "lower_bound_report",
    "FAMILY_COLUMNS",
]

KINDS = ("phi1", "phi2", "phi3")
FAMILY_COLUMNS = ("family", "m", "n", "p", "T", "N", "ratio")


def predicted_slopes(kind: str, m: int, n: int, p: float) -> tuple:
    """``(T-slope, N-slope)`` of the lower bound realized by ``kind``."""
    d = m + n
    t_exp = (m + 2) / (2.0 * p) - m / 4.0
    if kind == "phi1":
        return 0.0, d / 2.0 - (d + 2) / p
    if kind == "phi2":
        return t_exp, 0.0
    if kind == "phi3":
        return t_exp, n / 2.0 - (n + 2) / p
    raise ValueError(f"unknown family {kind!r}")


@dataclass(frozen=True)
class ExtremizerFamily:
    """One member of an extremizer family.

    ``data`` is the separable representation; ``realize`` samples it on a
    lattice.  ``support`` lists, per direction, the closed interval outside
    which the Fourier transform vanishes.
    """

    kind: str
    N: float
    T: float
    m: int
    n: int
    data: ProductField
    support: tuple

    def predicted(self, p: float) -> tuple:
        return predicted_slopes(self.kind, self.m, self.n, p)

    def realize(self, spec: WaveguideSpec) -> SpectralField:
        """Lattice samples of the Fourier transform; checks the support on ``spec``."""
        if (spec.m, spec.n) != (self.m, self.n):
            raise DimensionError("geometry mismatch")
        F = self.data.to_spectral(spec, tag=self.kind)
        if not support_contained(F, self.support):
            raise AssertionError("realized coefficients leak outside the declared support")
        if not np.any(F.coeffs):
            raise ParameterOutOfRange("lattice too coarse: realized field is zero")
        return F

    def l2_norm(self) -> float:
        return self.data.l2_norm()


def support_contained(F: SpectralField, support: Sequence) -> bool:
    """True when every nonzero coefficient lies in the product of ``support`` intervals."""
    grid = build_grid(F.spec)
    ok = np.ones(F.spec.dims, dtype=bool)
    for i, (lo, hi) in enumerate(support):
        fi = grid.freqs[i]
        ok &= grid.axis_view((fi >= lo - 1e-12) & (fi <= hi + 1e-12), i)
    return not np.any(F.coeffs[~ok])


def _line_box(lo, hi, label):
    return RealLineFactor.box(lo, hi, label=label)


def _torus_box(lo, hi, label):
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    kmax = int(math.ceil(abs(c) + 2 * h))
    return TorusFactor.from_profile(lambda k: chi_box(k, lo, hi), kmax, label=label)


def _doubled(lo, hi):
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return (c - 2 * h, c + 2 * h)


def _check(m, n, spec, N):
    if m < 1 or n < 1 or m + n not in (2, 3):
        raise DimensionError(f"need m, n >= 1 and m + n in {{2, 3}}, got m={m}, n={n}")
    if spec is not None:
        spec.check_cutoff(N)


def build_phi1(N: float, m: int = 1, n: int = 2, spec: WaveguideSpec | None = None) -> ExtremizerFamily:
    """``chi`` box ``[-N, N]`` in every direction.

    Raises
    ------
    NyquistViolation
        If ``spec`` is given and cannot resolve frequencies up to ``2N``.
    """
    _check(m, n, spec, N)
    f = [_line_box(-N, N, "R") for _ in range(m)] + [_torus_box(-N, N, "T") for _ in range(n)]
    sup = tuple([_doubled(-N, N)] * (m + n))
    return ExtremizerFamily("phi1", float(N), 1.0, m, n, ProductField(tuple(f), "phi1"), sup)


def build_phi2(T: float, m: int = 1, n: int = 2, N: float = 8.0,
               spec: WaveguideSpec | None = None) -> ExtremizerFamily:
    """Line box ``[0, T^(-1/2)]`` times the constant torus mode."""
    if T < 1:
        raise ParameterOutOfRange("T must be >= 1")
    _check(m, n, spec, N)
    w = T ** -0.5
    f = [_line_box(0.0, w, "R") for _ in range(m)]
    f += [TorusFactor([0], [1.0], "T0") for _ in range(n)]
    sup = tuple([_doubled(0.0, w)] * m + [(0.0, 0.0)] * n)
    return ExtremizerFamily("phi2", float(N), float(T), m, n, ProductField(tuple(f), "phi2"), sup)


def build_phi3(N: float, T: float, m: int = 1, n: int = 2,
               spec: WaveguideSpec | None = None) -> ExtremizerFamily:
    """Line box ``[0, T^(-1/2)]`` times the torus box ``[0, N]``."""
    if T < 1:
        raise ParameterOutOfRange("T must be >= 1")
    _check(m, n, spec, N)
    w = T ** -0.5
    f = [_line_box(0.0, w, "R") for _ in range(m)] + [_torus_box(0.0, N, "T") for _ in range(n)]
    sup = tuple([_doubled(0.0, w)] * m + [_doubled(0.0, N)] * n)
    return ExtremizerFamily("phi3", float(N), float(T), m, n, ProductField(tuple(f), "phi3"), sup)


def build_family(kind: str, N: float, T: float, m: int = 1, n: int = 2) -> ExtremizerFamily:
    if kind == "phi1":
        return build_phi1(N, m, n)
    if kind == "phi2":
        return build_phi2(T, m, n, N=N)
    if kind == "phi3":
        return build_phi3(N, T, m, n)
    raise ValueError(f"unknown family {kind!r}")


def ratio_sweep(kind: str, p: float, Ts: Iterable[float], Ns: Iterable[float],
                m: int = 1, n: int = 2) -> list:
    """Strichartz ratios of one family over the grid ``Ts x Ns``.

    Rows follow ``FAMILY_COLUMNS``.
    """
    rows = []
    for T in Ts:
        for N in Ns:
            fam = build_family(kind, N, T, m, n)
            r = strichartz_ratio(fam.data, p, T, N)
            rows.append({"family": kind, "m": m, "n": n, "p": p, "T": float(T), "N": float(N), "ratio": r})
    return rows


@dataclass(frozen=True)
class LowerBoundReport:
    family: str
    axis: str
    p: float
    slope: float
    predicted: float
    r2: float
    points: int
    tol: float
    passed: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def lower_bound_report(kind: str, p: float, rows: Sequence[dict], axis: str = "N",
                       m: int = 1, n: int = 2, tol: float = 0.1, min_points: int = 4) -> LowerBoundReport:
    """Log-log slope of the ratio along ``axis``; PASS iff ``slope >= predicted - tol``.

    Raises
    ------
    InsufficientSweep
        If ``axis`` has fewer than ``min_points`` distinct values.
    """
    if axis not in ("T", "N"):
        raise ValueError("axis must be 'T' or 'N'")
    x = [r[axis] for r in rows]
    y = [r["ratio"] for r in rows]
    fit = fit_power(x, y, min_points=min_points, axis=axis)
    pred = predicted_slopes(kind, m, n, p)[0 if axis == "T" else 1]
    slope = fit.slopes[0]
    return LowerBoundReport(kind, axis, float(p), slope, pred, fit.r2, fit.points, tol, slope >= pred - tol)
