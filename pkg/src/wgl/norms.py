"""Space-time Lebesgue norms of the free evolution, level sets and layer-cake sums.

Two evaluation engines share one interface:

* ``SpectralField`` data runs on the full periodized grid, streaming over
  time steps so memory stays proportional to one spatial grid;
* ``ProductField`` data runs factor by factor (see ``wgl.separable``).

Every norm is a trapezoidal sum in time on the grid ``dt / refine`` and is
reported together with the coarse sum at ``dt``.
"""

from __future__ import annotations

import math
import time as _time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import (
    SpectralField,
    build_grid,
    check_wraparound,
    fft_inverse,
    l2_norm,
    projector_symbol,
)
from .errors import (
    GridTooCoarse,
    InsufficientRange,
    LocalizationWarning,
    ZeroData,
)
from .quadrature import QuadratureSpec
from .separable import ProductField, log_level_measures

__all__ = [
    "QuadratureSpec",
    "NormResult",
    "LevelSetProfile",
    "DecayFit",
    "projected",
    "default_quadrature",
    "lp_spacetime_norm",
    "strichartz_ratio",
    "level_set_profile",
    "layer_cake_norm",
    "levelset_decay_fit",
    "s_norm",
    "s_norm_max",
    "s_norm_from_pieces",
    "ratio_record",
    "RATIO_COLUMNS",
]

RATIO_COLUMNS = ("m", "n", "p", "T", "N", "ratio", "err_est", "wall_time_s")


@dataclass(frozen=True)
class NormResult:
    value: float          # fine-grid value
    coarse: float         # value at dt
    err_est: float        # |coarse - fine| / fine
    p: float
    quad: QuadratureSpec
    series: np.ndarray = field(repr=False, default=None)


def projected(phi, N: float | None, mode: str | None = None):
    """``P_{<=N} phi`` for either engine (``N=None`` leaves data unchanged)."""
    if N is None or mode == "none":
        return phi
    if isinstance(phi, ProductField):
        return phi.project(N, "box" if mode is None else mode)
    grid = build_grid(phi.spec, cutoffs=(N,))
    return phi.with_coeffs(phi.coeffs * projector_symbol(grid, N, "smooth" if mode is None else mode))


def _band(F) -> float:
    if isinstance(F, ProductField):
        return F.band
    return F.band(1e-14)


def default_quadrature(phi, T: float, N: float | None, t0: float = 0.0, mode: str | None = None,
                       factor: float = 8.0, min_steps: int = 16) -> QuadratureSpec:
    """``dt = 1/(factor * N_eff^2)`` with ``N_eff = min(N, data band)``."""
    band = _band(projected(phi, N, mode))
    if N is not None:
        band = min(band, float(N))
    return QuadratureSpec.for_band(T, band, t0=t0, factor=factor, min_steps=min_steps)


def _grid_states(F: SpectralField, times: np.ndarray, resync: int = 256):
    """Yield physical samples of the evolution at uniformly spaced ``times``."""
    grid = F.grid
    h = times[1] - times[0] if times.size > 1 else 0.0
    step = np.exp(-2j * np.pi * h * grid.xi2)
    c = None
    for j, t in enumerate(times):
        if c is None or j % resync == 0:
            c = F.coeffs * np.exp(-2j * np.pi * t * grid.xi2)
        else:
            c = c * step
        yield j, t, fft_inverse(c, F.spec)


def _series_grid(F: SpectralField, times: np.ndarray, p: float, check_wrap: bool) -> np.ndarray:
    cell = F.spec.cell
    out = np.empty(times.size)
    for j, t, v in _grid_states(F, times):
        out[j] = kernels.abs_pow_sum(v, float(p)) * cell
        if check_wrap and (j == 0 or j == times.size - 1):
            check_wraparound(v, F.grid, where=f" at t={t:.4g}")
    return out


def lp_spacetime_norm(phi, p: float, quad: QuadratureSpec, N: float | None, mode: str | None = None,
                      check_wrap: bool = True, keep_series: bool = False) -> NormResult:
    """``(int_quad int |exp(it Delta) P_{<=N} phi|^p)^(1/p)`` with a refinement estimate."""
    if p < 2:
        raise ValueError("p must be >= 2")
    F = projected(phi, N, mode)
    times = quad.fine_times()
    if isinstance(F, ProductField):
        s = F.pnorm_series(times, p)
    else:
        s = _series_grid(F, times, p, check_wrap)
    fine = float(np.dot(quad.fine_weights(), s))
    coarse = float(np.dot(quad.coarse_weights(), s))
    vf, vc = fine ** (1.0 / p), coarse ** (1.0 / p)
    err = abs(vc - vf) / vf if vf > 0 else 0.0
    return NormResult(vf, vc, err, float(p), quad, s if keep_series else None)


def _norm2(phi) -> float:
    return phi.l2_norm() if isinstance(phi, ProductField) else l2_norm(phi)


def strichartz_ratio(phi, p: float, T: float, N: float | None, quad: QuadratureSpec | None = None,
                     mode: str | None = None, check_wrap: bool = True) -> float:
    """``||exp(it Delta) P_{<=N} phi||_{L^p([0,T] x X)} / ||phi||_2``."""
    nrm = _norm2(phi)
    if nrm == 0:
        raise ZeroData("ratio undefined for zero data")
    q = default_quadrature(phi, T, N, mode=mode) if quad is None else quad
    return lp_spacetime_norm(phi, p, q, N, mode, check_wrap).value / nrm


def ratio_record(phi, p: float, T: float, N: float, quad: QuadratureSpec | None = None,
                 mode: str | None = None) -> dict:
    """One CSV row ``(m, n, p, T, N, ratio, err_est, wall_time_s)``."""
    t0 = _time.perf_counter()
    nrm = _norm2(phi)
    if nrm == 0:
        raise ZeroData("ratio undefined for zero data")
    q = default_quadrature(phi, T, N, mode=mode) if quad is None else quad
    res = lp_spacetime_norm(phi, p, q, N, mode)
    m, n = (phi.m, phi.n) if isinstance(phi, ProductField) else (phi.spec.m, phi.spec.n)
    return {
        "m": m, "n": n, "p": p, "T": T, "N": N,
        "ratio": res.value / nrm, "err_est": res.err_est,
        "wall_time_s": _time.perf_counter() - t0,
    }


# ---------------------------------------------------------------- level sets


@dataclass(frozen=True)
class LevelSetProfile:
    """Measures ``|E_lambda|`` of ``{(t, x) : |F| > lambda}`` on a geometric grid.

    ``volume`` is the space-time volume (infinite for data on the line) and
    ``mass`` the conserved ``||F(t)||_2^2`` used for Chebyshev tail bounds.
    """

    lambdas: np.ndarray
    measures: np.ndarray
    volume: float
    mass: float
    T: float
    N: float | None
    lambda_max: float
    exact_reference: float | None = None

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        meas = np.asarray(self.measures, dtype=float)
        if lam.shape != meas.shape or lam.ndim != 1:
            raise ValueError("lambdas and measures must be matching 1D arrays")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("lambdas must be strictly increasing")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "measures", meas)


def _default_lambdas(lam_max: float, count: int = 256, span: float = 1e-6) -> np.ndarray:
    # the bound is attained when all phases align, so pad the top threshold
    top = lam_max * (1.0 + 1e-6)
    return np.geomspace(span * top, top, count)


def level_set_profile(phi, T: float, N: float | None, lambdas=None, quad: QuadratureSpec | None = None,
                      mode: str | None = None, bin_width: float = 2e-3) -> LevelSetProfile:
    """Super-level-set measures of the evolution of ``phi / ||phi||_2``.

    Time integration uses the trapezoid rule at ``quad.dt``.
    """
    nrm = _norm2(phi)
    if nrm == 0:
        raise ZeroData("level sets need nonzero data")
    F = projected(phi, N, mode)
    q = default_quadrature(phi, T, N, mode=mode) if quad is None else quad
    times = q.fine_times()[:: q.refine]
    w = q.coarse_weights()[:: q.refine]
    if isinstance(F, ProductField):
        F = F.scaled(1.0 / nrm)
        lam_max = F.lambda_max()
        lam = _default_lambdas(lam_max) if lambdas is None else np.asarray(lambdas, dtype=float)
        log_lam = np.log(np.maximum(lam, 1e-300))
        meas = np.zeros(lam.size)
        for t, wt in zip(times, w):
            mods = [f.moduli(t) for f in F.factors]
            meas += wt * log_level_measures(mods, log_lam, bin_width)
        volume = math.inf
        mass = F.l2_norm() ** 2
    else:
        F = F.with_coeffs(F.coeffs / nrm)
        lam_max = float(np.sum(np.abs(F.coeffs)) * F.spec.dxi)
        lam = _default_lambdas(lam_max) if lambdas is None else np.asarray(lambdas, dtype=float)
        meas = np.zeros(lam.size)
        cell = F.spec.cell
        for j, t, v in _grid_states(F, times):
            kernels.level_counts(np.abs(v), lam, float(w[j] * cell), meas)
        volume = T * F.spec.volume
        mass = l2_norm(F) ** 2
    return LevelSetProfile(lam, meas, volume, mass, T, N, lam_max)


def _segment_integral(p, l0, l1, e0, e1):
    """``int_{l0}^{l1} p lam^(p-1) E(lam)`` with ``E`` a power law through the end values."""
    if e0 <= 0:
        return 0.0
    if e1 <= 0:
        # profile drops to zero inside the cell: linear interpolation
        s = np.linspace(l0, l1, 65)
        f = p * s ** (p - 1) * e0 * (l1 - s) / (l1 - l0)
        return float(np.trapezoid(f, s))
    r = math.log(l1 / l0)
    a = -math.log(e1 / e0) / r
    k = p - a
    if abs(k * r) < 1e-12:
        return p * e0 * l0**p * r
    return p * e0 * l0**p * math.expm1(k * r) / k


def layer_cake_norm(profile: LevelSetProfile, p: float, tail_tol: float = 1e-3) -> float:
    """``(p int_0^inf lam^(p-1) |E_lam| dlam)^(1/p)`` from a sampled profile.

    Between grid points ``|E_lam|`` is interpolated as a power law.  Below the
    first threshold ``lam_0`` the contribution is taken as
    ``lam_0^p |E_{lam_0}|``, with the error bounded by both
    ``lam_0^p (volume - |E_{lam_0}|)`` and the Chebyshev bound
    ``p/(p-2) T mass lam_0^(p-2)``.
    """
    lam, E = profile.lambdas, profile.measures
    if E[-1] > 0:
        raise GridTooCoarse(f"|E| = {E[-1]:.3g} > 0 at the largest threshold {lam[-1]:.4g}")
    body = 0.0
    for i in range(lam.size - 1):
        body += _segment_integral(p, lam[i], lam[i + 1], E[i], E[i + 1])
    l0 = lam[0]
    head = l0**p * E[0]
    bounds = [l0**p * (profile.volume - E[0])]
    if p > 2:
        bounds.append(p / (p - 2.0) * profile.T * profile.mass * l0 ** (p - 2.0))
    tail_bound = min(bounds)
    total = body + head
    if not total > 0:
        raise GridTooCoarse("profile is identically zero")
    if tail_bound > tail_tol * total:
        raise GridTooCoarse(f"tail below lambda_0 may carry {tail_bound / total:.2e} of the total")
    return total ** (1.0 / p)


@dataclass(frozen=True)
class DecayFit:
    constant: float        # sup over lambda > lambda_min of |E_lambda| lambda^e
    argmax: float
    points: int
    exponent: float
    lambda_min: float


def levelset_decay_fit(profile: LevelSetProfile, e: float, lambda_min: float, min_points: int = 5) -> DecayFit:
    """``sup_{lambda > lambda_min} |E_lambda| lambda^e`` over the profile's grid."""
    sel = profile.lambdas > lambda_min
    k = int(sel.sum())
    if k < min_points:
        raise InsufficientRange(f"only {k} thresholds above lambda_min={lambda_min:.4g}")
    lam = profile.lambdas[sel]
    vals = profile.measures[sel] * lam**e
    i = int(np.argmax(vals))
    return DecayFit(float(vals[i]), float(lam[i]), k, float(e), float(lambda_min))


# --------------------------------------------------------------- S-norms


def _unit_pieces(J):
    a, b = map(float, J)
    if not b > a:
        raise ValueError("J must be a nonempty interval")
    out = []
    m = math.floor(a)
    while m < b:
        lo, hi = max(a, m), min(b, m + 1.0)
        if hi - lo > 1e-12:
            out.append((lo, hi))
        m += 1
    return out


def localization_fraction(phi, N: float) -> float:
    """Fraction of ``||phi||_2^2`` outside the shell ``N/4 <= |xi| <= 4N``."""
    if isinstance(phi, ProductField):
        w = np.ones(1)
        r2 = np.zeros(1)
        for f in phi.factors:
            if f.kind == "T":
                xi, wi = f.ks.astype(float), np.abs(f.coeffs) ** 2
            else:
                xi = np.linspace(-f.xi_max, f.xi_max, 2049)
                wi = np.abs(f.spectral_samples(xi)) ** 2 * (xi[1] - xi[0])
            w = np.multiply.outer(w, wi).ravel()
            r2 = np.add.outer(r2, xi**2).ravel()
    else:
        w = (np.abs(phi.coeffs) ** 2).ravel()
        r2 = phi.grid.xi2.ravel()
    tot = w.sum()
    if tot == 0:
        return 0.0
    inside = (r2 >= (N / 4.0) ** 2) & (r2 <= (4.0 * N) ** 2)
    return float(w[~inside].sum() / tot)


def _check_localized(phi, N):
    frac = localization_fraction(phi, N)
    if frac >= 0.01:
        warnings.warn(f"{frac:.3g} of the mass lies outside N/4 <= |xi| <= 4N", LocalizationWarning, stacklevel=3)
    return frac


def s_norm_from_pieces(pieces, N: float, q: float, qt: float) -> float:
    """``l^q`` sum of ``N^(5/qt - 1/2) * pieces``."""
    a = N ** (5.0 / qt - 0.5) * np.asarray(pieces, dtype=float)
    return float(np.sum(a**q) ** (1.0 / q))


def _pieces(phi, N, qt, J, factor, mode):
    out = []
    for lo, hi in _unit_pieces(J):
        quad = default_quadrature(phi, hi - lo, N, t0=lo, mode=mode, factor=factor)
        out.append(lp_spacetime_norm(phi, qt, quad, N, mode, check_wrap=False).value)
    return out


def s_norm(phi, N: float, q: float, qt: float, J, factor: float = 8.0, mode: str | None = "none") -> float:
    """Long-time Strichartz norm: ``l^q`` over unit intervals of weighted ``L^qt`` norms.

    The evolution is ``exp(it Delta) phi`` with no further projection; a
    ``LocalizationWarning`` is issued when ``phi`` is not concentrated at
    ``|xi| ~ N``.
    """
    if not (3.5 <= q <= 4.0 and 5.0 <= qt <= 12.0):
        raise ValueError("need 7/2 <= q <= 4 and 5 <= qt <= 12")
    _check_localized(phi, N)
    return s_norm_from_pieces(_pieces(phi, N, qt, J, factor, mode), N, q, qt)


def s_norm_max(phi, N: float, q: float, J, factor: float = 8.0, mode: str | None = "none") -> float:
    """Maximal variant: per interval the larger of the ``qt = 5`` and ``qt = 12`` terms."""
    if not 3.5 <= q <= 4.0:
        raise ValueError("need 7/2 <= q <= 4")
    _check_localized(phi, N)
    p5 = N ** (5.0 / 5 - 0.5) * np.asarray(_pieces(phi, N, 5.0, J, factor, mode))
    p12 = N ** (5.0 / 12 - 0.5) * np.asarray(_pieces(phi, N, 12.0, J, factor, mode))
    a = np.maximum(p5, p12)
    return float(np.sum(a**q) ** (1.0 / q))
