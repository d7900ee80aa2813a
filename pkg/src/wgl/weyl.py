"""The frequency-localized kernel ``K_N`` and one-dimensional Weyl sums.

``K_N(t, x) = int prod_i chi(xi_i / N) exp(2 pi i (x . xi - t |xi|^2)) dxi``
factorizes over directions, so ``sup_x |K_N(t, .)|`` is the product of the
suprema of the line kernel and of the Weyl sum
``S(t, y) = sum_k chi(k / N) exp(2 pi i (y k - t k^2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.fft as sfft
from scipy.integrate import quad

from . import kernels
from .core import PhysicalField, SpectralField, WaveguideSpec, build_grid, inverse_transform, propagate
from .cutoffs import chi, psi
from .errors import InsufficientRange, ParameterOutOfRange
from .separable import TAIL, RealLineFactor

__all__ = [
    "VARIANTS",
    "KernelQuery",
    "EnvelopeReport",
    "eval_kernel",
    "kernel_sup",
    "line_kernel_sup",
    "weyl_sum",
    "weyl_sup",
    "weyl_envelope_check",
    "WeylReport",
    "dispersive_check",
    "envelope_stability",
    "regime_bound",
    "j_decomposition",
    "rational_times",
]

# variant -> (m, n)
VARIANTS = {"R2T": (2, 1), "RT2": (1, 2)}
KERNEL_COLUMNS = ("variant", "N", "t", "sup_abs", "bound", "ratio")


def _weights(ks: np.ndarray, N: float) -> np.ndarray:
    return chi(ks / float(N))


def _ks(N: float) -> np.ndarray:
    r = int(math.floor(2 * N))
    return np.arange(-r, r + 1)


# ----------------------------------------------------------------- Weyl sums


def weyl_sum(t: float, y, N: float, method: str = "direct"):
    """``S(t, y)`` for scalar or array ``y``.

    ``"direct"`` sums over ``|k| <= 2N``; ``"fft"`` requires ``y`` on the
    uniform grid ``j / M`` and is selected through ``weyl_sup``.
    """
    ks = _ks(N)
    w = _weights(ks, N)
    if method != "direct":
        raise ValueError("weyl_sum evaluates directly; use weyl_sup for the FFT route")
    y = np.asarray(y, dtype=float)
    return kernels.weyl_direct(ks, w, float(t), y) if y.ndim else complex(
        kernels.weyl_direct(ks, w, float(t), y.reshape(1))[0])


def _weyl_grid(t: float, N: float, M: int) -> np.ndarray:
    ks = _ks(N)
    c = np.zeros(M, dtype=complex)
    ph = np.exp(-2j * np.pi * ((t * (ks * ks).astype(float)) % 1.0))
    np.add.at(c, np.mod(ks, M), _weights(ks, N) * ph)
    return sfft.ifft(c) * M


def weyl_sup(t: float, N: float, oversample: int = 64, method: str = "fft") -> float:
    """``max_y |S(t, y)|`` on the grid of ``oversample * N`` points of ``[0, 1)``."""
    M = int(max(oversample * N, 4 * N + 2))
    if method == "fft":
        return float(np.abs(_weyl_grid(t, N, M)).max())
    y = np.arange(M) / M
    return float(np.abs(weyl_sum(t, y, N)).max())


# ---------------------------------------------------------------- line kernel


class _LineKernel:
    _cache: dict = {}

    @classmethod
    def get(cls, N: float) -> RealLineFactor:
        key = float(N)
        f = cls._cache.get(key)
        if f is None:
            f = RealLineFactor(lambda x: chi(x / key), 2.0 * key, TAIL / key, label="K")
            cls._cache[key] = f
        return f


def _parabolic_peak(v: np.ndarray) -> float:
    i = int(np.argmax(v))
    a, b, c = v[i - 1], v[i], v[(i + 1) % v.size]
    den = a - 2 * b + c
    if den >= 0:
        return float(b)
    return float(b - 0.125 * (a - c) ** 2 / den)


def line_kernel_sup(t: float, N: float) -> float:
    """``sup_y |int chi(eta / N) exp(2 pi i (y eta - t eta^2)) d eta|``."""
    f = _LineKernel.get(N)
    v, _ = f.moduli(float(t))
    return _parabolic_peak(v)


def kernel_sup(t, N: float, variant: str = "RT2") -> np.ndarray:
    """``sup_x |K_N(t, .)|`` for each ``t``."""
    m, n = VARIANTS[variant]
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(ts.size)
    for i, tt in enumerate(ts):
        out[i] = line_kernel_sup(abs(tt), N) ** m * weyl_sup(abs(tt), N) ** n
    return out


def eval_kernel(t: float, N: float, spec: WaveguideSpec, method: str = "grid") -> PhysicalField:
    """``K_N(t, .)`` on the space grid of ``spec``.

    ``"grid"`` propagates the multiplier ``prod chi(xi_i / N)`` and inverts
    the transform; ``"direct"`` multiplies one-dimensional quadratures of the
    line kernel with directly summed Weyl sums.  On the periodized box the
    two agree up to the wrap-around of the line kernel.
    """
    spec.check_cutoff(N)
    grid = build_grid(spec, cutoffs=(N,))
    if method == "grid":
        c = np.ones(spec.dims)
        for i in range(spec.d):
            c = c * grid.axis_view(chi(grid.freqs[i] / N), i)
        return inverse_transform(propagate(SpectralField(spec, c.astype(complex), "K"), t))
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    out = np.ones(spec.dims, dtype=complex)
    lk = _LineKernel.get(N)
    for i in range(spec.d):
        x = grid.coords[i]
        if i < spec.m:
            v = lk.values_at(t, x)
        else:
            v = weyl_sum(t, x, N)
        out = out * grid.axis_view(v, i)
    return PhysicalField(spec, out)


# --------------------------------------------------------------- Weyl envelope


@dataclass(frozen=True)
class WeylReport:
    a: int
    q: int
    N: float
    offsets: tuple
    sups: tuple
    envelopes: tuple
    ratios: tuple
    limit: float = 8.0

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    @property
    def passed(self) -> bool:
        return self.max_ratio <= self.limit


def weyl_envelope(t: float, a: int, q: int, N: float) -> float:
    return N / (math.sqrt(q) * (1.0 + N * math.sqrt(abs(t - a / q))))


def weyl_envelope_check(a: int, q: int, N: float, offsets: Sequence[float] = (0.0,),
                        limit: float = 8.0) -> WeylReport:
    """``sup_y |S(a/q + offset, y)|`` against ``N / (q^(1/2) (1 + N |offset|^(1/2)))``.

    Raises
    ------
    ParameterOutOfRange
        If ``|t| <= 4/N``, ``q`` is outside ``[1, N]``, ``gcd(a, q) != 1`` or
        ``a == 0``.
    """
    if not 1 <= q <= N:
        raise ParameterOutOfRange("need 1 <= q <= N")
    if a == 0 or math.gcd(a, q) != 1:
        raise ParameterOutOfRange("need a != 0 and gcd(a, q) = 1")
    sups, envs, ratios = [], [], []
    for off in offsets:
        t = a / q + off
        if abs(t) <= 4.0 / N:
            raise ParameterOutOfRange(f"|t| = {abs(t):.4g} must exceed 4/N")
        s = weyl_sup(t, N)
        e = weyl_envelope(t, a, q, N)
        sups.append(s)
        envs.append(e)
        ratios.append(s / e)
    return WeylReport(a, q, float(N), tuple(offsets), tuple(sups), tuple(envs), tuple(ratios), limit)


# ------------------------------------------------------------ kernel envelopes


def regime_bound(t: np.ndarray, N: float, variant: str, regime: int) -> np.ndarray:
    """The kernel envelope of ``regime`` (1: ``|t| <= 1/N``, 2: ``1/N < |t| <= 1``, 3: ``|t| > 1``)."""
    t = np.abs(np.asarray(t, dtype=float))
    if regime == 1:
        return np.minimum(float(N) ** 3, t ** -1.5)
    if variant == "R2T":
        return N * t ** -0.5 if regime == 2 else N / t
    return N**2 * t**0.5 if regime == 2 else N**2 * t ** -0.5


def regime_of(t: np.ndarray, N: float) -> np.ndarray:
    t = np.abs(np.asarray(t, dtype=float))
    return np.where(t <= 1.0 / N, 1, np.where(t <= 1.0, 2, 3))


def rational_times(lo: float, hi: float, qmax: int = 8) -> np.ndarray:
    """All ``a/q`` in ``[lo, hi]`` with ``q <= qmax``."""
    vals = set()
    for q in range(1, qmax + 1):
        for a in range(int(math.ceil(lo * q)), int(math.floor(hi * q)) + 1):
            vals.add(Fraction(a, q))
    return np.array(sorted(float(v) for v in vals if v > 0))


def default_times(N: float, t_max: float = 8.0, per_decade: int = 12) -> np.ndarray:
    lo = 1.0 / (4.0 * N**3)
    k = int(math.ceil(per_decade * math.log10(t_max / lo)))
    geo = np.geomspace(lo, t_max, k + 1)
    return np.unique(np.concatenate([geo, rational_times(1.0 / N, t_max)]))


@dataclass(frozen=True)
class KernelQuery:
    variant: str
    N: float
    times: np.ndarray
    sups: np.ndarray

    def rows(self) -> list:
        out = []
        reg = regime_of(self.times, self.N)
        for t, s, r in zip(self.times, self.sups, reg):
            b = float(regime_bound(np.array([t]), self.N, self.variant, int(r))[0])
            out.append({"variant": self.variant, "N": self.N, "t": float(t), "sup_abs": float(s),
                        "bound": b, "ratio": float(s) / b})
        return out


@dataclass(frozen=True)
class EnvelopeReport:
    variant: str
    N: float
    constants: dict            # regime -> sup of measured / bound
    boundaries: tuple          # (1/N, 1)
    counts: dict               # regime -> number of t samples
    query: KernelQuery = field(repr=False, default=None)


def dispersive_check(N: float, variant: str = "RT2", times=None, sups=None) -> EnvelopeReport:
    """Per-regime constants ``sup measured / envelope`` of ``sup_x |K_N|``.

    ``sups`` may supply measured values (for synthetic checks); otherwise
    they are computed with ``kernel_sup``.

    Raises
    ------
    InsufficientRange
        If some regime has no sample time.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {sorted(VARIANTS)}")
    ts = default_times(N) if times is None else np.asarray(times, dtype=float)
    ts = np.sort(np.abs(ts))
    reg = regime_of(ts, N)
    counts = {r: int(np.sum(reg == r)) for r in (1, 2, 3)}
    missing = [r for r, c in counts.items() if c == 0]
    if missing:
        raise InsufficientRange(f"t-grid misses regime(s) {missing}")
    vals = kernel_sup(ts, N, variant) if sups is None else np.asarray(sups, dtype=float)
    const = {}
    for r in (1, 2, 3):
        sel = reg == r
        const[r] = float(np.max(vals[sel] / regime_bound(ts[sel], N, variant, r)))
    return EnvelopeReport(variant, float(N), const, (1.0 / N, 1.0), counts, KernelQuery(variant, float(N), ts, vals))


def envelope_stability(variant: str, Ns: Sequence[float] = (16, 32), factor: float = 2.0) -> dict:
    """Ratios of per-regime constants across ``Ns``; PASS iff all within ``factor``."""
    reps = [dispersive_check(N, variant) for N in Ns]
    out = {"variant": variant, "Ns": tuple(Ns), "constants": {}, "spread": {}}
    ok = True
    for r in (1, 2, 3):
        cs = [rep.constants[r] for rep in reps]
        spread = max(cs) / min(cs)
        out["constants"][r] = cs
        out["spread"][r] = spread
        ok &= spread <= factor
    out["passed"] = bool(ok)
    return out


# ----------------------------------------------------------- J decomposition


def _j1_hat_sup(T: float, A: float) -> float:
    # integrand psi(t/T) chi(t/A) >= 0: its Fourier transform peaks at 0
    val, _ = quad(lambda s: float(psi(s / T)) * float(chi(s / A)), -2.0 * A, 2.0 * A, limit=200)
    return val


def _piece_times(lo: float, hi: float, samples: int) -> np.ndarray:
    return np.unique(np.concatenate([np.geomspace(lo, hi, samples), rational_times(lo, hi)]))


def _envelope(ts: np.ndarray, report: EnvelopeReport) -> np.ndarray:
    reg = regime_of(ts, report.N)
    out = np.empty(ts.size)
    for r in (1, 2, 3):
        sel = reg == r
        out[sel] = report.constants[r] * regime_bound(ts[sel], report.N, report.variant, r)
    return out


def _sup_piece(weight, lo: float, hi: float, N: float, variant: str, report, samples: int = 96) -> float:
    if hi <= lo:
        return 0.0
    ts = _piece_times(lo, hi, samples)
    w = weight(ts)
    keep = w > 0
    if not keep.any():
        return 0.0
    k = kernel_sup(ts[keep], N, variant) if report is None else _envelope(ts[keep], report)
    return float(np.max(w[keep] * k))


def j_decomposition(N: float, T: float, A: float, variant: str = "RT2", method: str = "envelope",
                    report: EnvelopeReport | None = None) -> dict:
    """Sizes of the four pieces of ``psi(t/T) K_N``.

    ``J1`` keeps ``|t| <~ A``, ``J2`` the range ``A <~ |t| <~ 1/N``, ``J3``
    ``1/N <~ |t| <~ 1`` and ``J4`` the rest up to ``|t| <= 2T``.  Returned
    are ``sup |J1_hat|`` (space-time transform) and ``sup |J2|``,
    ``sup |J3|``, ``sup |J4|``.  With ``method="envelope"`` the kernel is
    replaced by its fitted per-regime envelope from ``dispersive_check``;
    ``method="direct"`` uses the sampled ``sup_x |K_N(t, .)|`` instead.  By
    the symmetry ``|K_N(-t)| = |K_N(t)|`` only ``t > 0`` is sampled.
    """
    if not 0 < A < 1.0 / N:
        raise ParameterOutOfRange("need 0 < A < 1/N")
    if T < 1:
        raise ParameterOutOfRange("need T >= 1")
    if method == "envelope":
        rep = dispersive_check(N, variant) if report is None else report
    elif method == "direct":
        rep = None
    else:
        raise ValueError(f"unknown method {method!r}")
    ps = lambda t: psi(t / T)  # noqa: E731
    j2 = _sup_piece(lambda t: ps(t) * chi(N * t) * (1 - chi(t / A)), A, 2.0 / N, N, variant, rep)
    j3 = _sup_piece(lambda t: ps(t) * chi(t) * (1 - chi(N * t)), 1.0 / N, 2.0, N, variant, rep)
    j4 = _sup_piece(lambda t: ps(t) * (1 - chi(t)), 1.0, 2.0 * T, N, variant, rep)
    return {"N": float(N), "T": float(T), "A": float(A), "variant": variant, "method": method,
            "J1_hat": _j1_hat_sup(T, A), "J2": j2, "J3": j3, "J4": j4, "psi_max": psi.max}
