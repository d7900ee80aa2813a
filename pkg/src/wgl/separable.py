"""Tensor-product data on R^m x T^n evaluated one direction at a time.

For ``phi_hat(xi) = prod_i a_i(xi_i)`` the free evolution factorizes,
``F(t, x) = prod_i F_i(t, x_i)``, so space integrals of ``|F|^p`` are products
of one-dimensional integrals.  This makes long times and large cutoffs
affordable without a full three-dimensional grid, and without periodizing
the Euclidean directions.

Torus factors are 1-periodic in time.  Euclidean factors use a spectral box
for small ``|t|`` and, once the solution has spread, the exact Fresnel form

    F(t, x) = (2 i t)^(-1/2) exp(i pi x^2 / (2t)) g_t_hat(x / (2t)),
    g_t(y) = phi(y) exp(i pi y^2 / (2t)),

so that ``int |F|^p dx = (2|t|)^(1 - p/2) int |g_t_hat(z)|^p dz``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft
from scipy.signal import fftconvolve

from .core import SpectralField, WaveguideSpec, build_grid
from .cutoffs import chi, chi_box
from .errors import DimensionError

# |FT of chi(./h)| falls below 5e-11 of its peak beyond |y| = TAIL / h
TAIL = 30.0
_CHUNK = 1 << 19  # complex entries per batched FFT block


def _pow2(n: float, floor: int = 16) -> int:
    return max(floor, 1 << int(math.ceil(math.log2(max(n, 1.0)))))


def _row_pow_sums(A: np.ndarray, p: float) -> np.ndarray:
    a2 = A.real * A.real + A.imag * A.imag
    if p == 2.0:
        return a2.sum(axis=-1)
    if p == 4.0:
        return (a2 * a2).sum(axis=-1)
    if p == 6.0:
        return (a2 * a2 * a2).sum(axis=-1)
    return (a2 ** (0.5 * p)).sum(axis=-1)


def _batched(times: np.ndarray, width: int):
    step = max(1, _CHUNK // max(width, 1))
    for s in range(0, times.size, step):
        yield s, times[s:s + step]


class TorusFactor:
    """One circle direction with coefficients ``c_k`` on integer frequencies."""

    kind = "T"
    periodic = True

    def __init__(self, ks: Sequence[int], coeffs: Sequence[complex], label: str = ""):
        ks = np.asarray(ks, dtype=np.int64)
        c = np.asarray(coeffs, dtype=complex)
        if ks.shape != c.shape or ks.ndim != 1:
            raise ValueError("ks and coeffs must be matching 1D arrays")
        keep = c != 0
        if not keep.any():
            keep[:] = False
            ks, c = np.zeros(1, dtype=np.int64), np.zeros(1, dtype=complex)
        else:
            ks, c = ks[keep], c[keep]
        self.ks = ks
        self.coeffs = c
        self.label = label
        self.band = float(np.abs(ks).max())
        self.M = _pow2(8 * (self.band + 1))

    @classmethod
    def from_profile(cls, profile: Callable, kmax: int, label: str = "") -> "TorusFactor":
        ks = np.arange(-int(kmax), int(kmax) + 1)
        return cls(ks, profile(ks.astype(float)), label)

    def filtered(self, symbol: Callable) -> "TorusFactor":
        return TorusFactor(self.ks, self.coeffs * symbol(self.ks.astype(float)), self.label)

    def scaled(self, c: complex) -> "TorusFactor":
        return TorusFactor(self.ks, self.coeffs * c, self.label)

    def l2_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def l1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def _values(self, times: np.ndarray) -> np.ndarray:
        base = np.zeros((times.size, self.M), dtype=complex)
        ph = np.exp(-2j * np.pi * np.outer(np.mod(times, 1.0), self.ks.astype(float) ** 2))
        base[:, np.mod(self.ks, self.M)] = ph * self.coeffs
        return sfft.ifft(base, axis=1) * self.M

    def _unique_mod(self, times: np.ndarray):
        key = np.round(np.mod(times, 1.0) * 2.0**36).astype(np.int64) % (1 << 36)
        uniq, inv = np.unique(key, return_inverse=True)
        first = np.zeros(uniq.size, dtype=np.int64)
        first[inv[::-1]] = np.arange(times.size)[::-1]
        return times[first], inv

    def pnorm_series(self, times: np.ndarray, p: float) -> np.ndarray:
        """``int_T |F(t, x)|^p dx`` at each time (cell ``1/M``)."""
        times = np.asarray(times, dtype=float)
        tu, inv = self._unique_mod(times)
        out = np.empty(tu.size)
        for s, tb in _batched(tu, self.M):
            out[s:s + tb.size] = _row_pow_sums(self._values(tb), p) / self.M
        return out[inv]

    def moduli(self, t: float):
        v = np.abs(self._values(np.array([t]))[0])
        return v, np.full(v.size, 1.0 / self.M)

    def values_at(self, t: float, x: np.ndarray) -> np.ndarray:
        ph = np.exp(2j * np.pi * (np.outer(x, self.ks) - t * self.ks.astype(float) ** 2))
        return ph @ self.coeffs

    def spectral_samples(self, freqs: np.ndarray) -> np.ndarray:
        out = np.zeros(freqs.size, dtype=complex)
        k = np.rint(freqs).astype(np.int64)
        lut = dict(zip(self.ks.tolist(), self.coeffs.tolist()))
        for i, kk in enumerate(k.tolist()):
            out[i] = lut.get(kk, 0.0)
        return out


class RealLineFactor:
    """One Euclidean direction with a compactly supported spectral profile.

    Parameters
    ----------
    profile : callable
        Vectorized ``xi -> a(xi)``; must vanish for ``|xi| > xi_max``.
    xi_max : float
        Spectral support radius.
    y_extent : float
        Half-width of the physical profile: ``|phi(y)|`` is negligible beyond
        it (relative 1e-10).
    """

    kind = "R"
    periodic = False

    def __init__(self, profile: Callable, xi_max: float, y_extent: float, label: str = ""):
        if not (xi_max > 0 and y_extent > 0):
            raise ValueError("xi_max and y_extent must be positive")
        self.profile = profile
        self.xi_max = float(xi_max)
        self.Y = float(y_extent)
        self.label = label
        # box regime for |t| <= t_switch, Fresnel regime beyond
        self.t_switch = self.Y / (2.0 * self.xi_max)
        box = 6.0 * self.Y
        self.M_box = _pow2(8.0 * self.xi_max * box)
        self.delta = 1.0 / box
        self._xi_box = sfft.fftfreq(self.M_box, d=box / self.M_box)
        self._prof_box = self._eval(self._xi_box)
        self.M_fr = _pow2(64.0 * self.xi_max * self.Y)
        self.h = 1.0 / (8.0 * self.xi_max)
        span = self.M_fr * self.h
        self._y = sfft.fftfreq(self.M_fr, d=1.0 / span)  # y_j = j h, centred
        xi_f = sfft.fftfreq(self.M_fr, d=self.h)
        self._dz = 1.0 / span
        self._phi_y = sfft.ifft(self._eval(xi_f)) * self.M_fr * self._dz
        nq = int(min(1 << 22, _pow2(4.0 * 2.0 * self.xi_max * box)))
        self._quad_xi = np.linspace(-self.xi_max, self.xi_max, nq + 1)
        self._quad_w = np.full(nq + 1, 2.0 * self.xi_max / nq)
        self._quad_w[[0, -1]] *= 0.5
        self._band = None

    def _eval(self, xi):
        out = np.asarray(self.profile(np.asarray(xi, dtype=float)), dtype=complex)
        return np.where(np.abs(xi) <= self.xi_max, out, 0.0)

    @classmethod
    def box(cls, lo: float, hi: float, label: str = "") -> "RealLineFactor":
        """``chi`` scaled to equal 1 on ``[lo, hi]``."""
        c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return cls(lambda x: chi_box(x, lo, hi), max(abs(c - 2 * h), abs(c + 2 * h)), TAIL / h, label)

    @classmethod
    def packets(cls, width: float, centers, amps, label: str = "") -> "RealLineFactor":
        """``chi(xi / width) * sum_j a_j exp(-2 pi i xi y_j)``: bumps centred at ``y_j``."""
        centers = np.asarray(centers, dtype=float)
        amps = np.asarray(amps, dtype=complex)

        def prof(x):
            ph = np.exp(-2j * np.pi * np.multiply.outer(x, centers))
            return chi(x / width) * (ph @ amps)

        return cls(prof, 2.0 * width, float(np.abs(centers).max()) + TAIL / width, label)

    def filtered(self, symbol: Callable, xi_max: float | None = None, y_pad: float = 0.0) -> "RealLineFactor":
        base = self.profile
        xm = self.xi_max if xi_max is None else min(self.xi_max, xi_max)
        return RealLineFactor(lambda x: base(x) * symbol(x), xm, self.Y + y_pad, self.label)

    def scaled(self, c: complex) -> "RealLineFactor":
        base = self.profile
        return RealLineFactor(lambda x: c * base(x), self.xi_max, self.Y, self.label)

    @property
    def band(self) -> float:
        """Largest ``|xi|`` where the profile exceeds 1e-12 of its maximum."""
        if self._band is None:
            a = np.abs(self._eval(self._quad_xi))
            big = a > 1e-12 * a.max() if a.max() > 0 else a > 0
            self._band = float(np.abs(self._quad_xi[big]).max()) if big.any() else 0.0
        return self._band

    def l2_sq(self) -> float:
        return float(np.sum(self._quad_w * np.abs(self._eval(self._quad_xi)) ** 2))

    def l1(self) -> float:
        # the sampled evolution is bounded by the Riemann sum, which may exceed
        # the integral by rounding-level amounts
        quad = float(np.sum(self._quad_w * np.abs(self._eval(self._quad_xi))))
        riemann = float(np.sum(np.abs(self._prof_box)) * self.delta)
        return max(quad, riemann)

    def _box_values(self, times: np.ndarray) -> np.ndarray:
        ph = np.exp(-2j * np.pi * np.outer(times, self._xi_box**2))
        return sfft.ifft(ph * self._prof_box, axis=1) * (self.M_box * self.delta)

    def _fresnel_values(self, times: np.ndarray) -> np.ndarray:
        chirp = np.exp(1j * np.pi * np.outer(1.0 / (2.0 * times), self._y**2))
        return sfft.fft(chirp * self._phi_y, axis=1) * self.h

    def pnorm_series(self, times: np.ndarray, p: float) -> np.ndarray:
        """``int_R |F(t, x)|^p dx`` at each time."""
        times = np.asarray(times, dtype=float)
        out = np.empty(times.size)
        small = np.abs(times) <= self.t_switch
        idx = np.nonzero(small)[0]
        for s, tb in _batched(times[idx], self.M_box):
            out[idx[s:s + tb.size]] = _row_pow_sums(self._box_values(tb), p) / (self.M_box * self.delta)
        idx = np.nonzero(~small)[0]
        for s, tb in _batched(times[idx], self.M_fr):
            scale = (2.0 * np.abs(tb)) ** (1.0 - 0.5 * p)
            out[idx[s:s + tb.size]] = scale * _row_pow_sums(self._fresnel_values(tb), p) * self._dz
        return out

    def moduli(self, t: float):
        """Samples of ``|F(t, .)|`` with their cell lengths."""
        if abs(t) <= self.t_switch:
            v = np.abs(self._box_values(np.array([t]))[0])
            return v, np.full(v.size, 1.0 / (self.M_box * self.delta))
        g = np.abs(self._fresnel_values(np.array([t]))[0])
        s = 2.0 * abs(t)
        return g / np.sqrt(s), np.full(g.size, s * self._dz)

    def values_at(self, t: float, x: np.ndarray) -> np.ndarray:
        """Direct evaluation of ``F(t, x)`` by quadrature over the spectral support."""
        xs = np.ravel(x)
        reach = (np.abs(xs).max() if xs.size else 0.0) + self.Y + 2.0 * self.xi_max * abs(t)
        nq = _pow2(8.0 * self.xi_max * reach)
        xi = np.linspace(-self.xi_max, self.xi_max, nq + 1)
        w = np.full(nq + 1, 2.0 * self.xi_max / nq)
        w[[0, -1]] *= 0.5
        a = self._eval(xi) * w * np.exp(-2j * np.pi * t * xi**2)
        out = np.empty(np.size(x), dtype=complex)
        for s in range(0, xs.size, 256):
            out[s:s + 256] = np.exp(2j * np.pi * np.outer(xs[s:s + 256], xi)) @ a
        return out.reshape(np.shape(x))

    def spectral_samples(self, freqs: np.ndarray) -> np.ndarray:
        return self._eval(freqs)


Factor = TorusFactor | RealLineFactor


@dataclass(frozen=True, eq=False)
class ProductField:
    """Initial data ``prod_i a_i(xi_i)``: Euclidean factors first, then torus factors."""

    factors: tuple
    tag: str = ""

    def __post_init__(self):
        f = tuple(self.factors)
        object.__setattr__(self, "factors", f)
        kinds = [x.kind for x in f]
        m = kinds.count("R")
        if kinds != ["R"] * m + ["T"] * (len(f) - m):
            raise DimensionError("Euclidean factors must precede torus factors")
        n = len(f) - m
        if m < 1 or n < 1 or m + n not in (2, 3):
            raise DimensionError(f"need m, n >= 1 and m + n in {{2, 3}}, got m={m}, n={n}")

    @property
    def m(self) -> int:
        return sum(1 for x in self.factors if x.kind == "R")

    @property
    def n(self) -> int:
        return len(self.factors) - self.m

    @property
    def d(self) -> int:
        return len(self.factors)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.prod([x.l2_sq() for x in self.factors])))

    def lambda_max(self) -> float:
        """``||phi_hat||_1``, an upper bound for ``sup |F|``."""
        return float(np.prod([x.l1() for x in self.factors]))

    @property
    def band(self) -> float:
        return max(x.band for x in self.factors)

    def scaled(self, c: complex) -> "ProductField":
        f = list(self.factors)
        f[0] = f[0].scaled(c)
        return ProductField(tuple(f), self.tag)

    def normalized(self) -> "ProductField":
        return self.scaled(1.0 / self.l2_norm())

    def project(self, N: float, mode: str = "box") -> "ProductField":
        """Apply ``prod_i chi(xi_i / N)``; the only separable projector."""
        if mode != "box":
            raise ValueError("separable data supports only the 'box' projector")
        sym = lambda x: chi(x / N)  # noqa: E731
        out = []
        for f in self.factors:
            if f.kind == "R":
                out.append(f.filtered(sym, xi_max=2.0 * N, y_pad=TAIL / N))
            else:
                out.append(f.filtered(sym))
        return ProductField(tuple(out), self.tag)

    def pnorm_series(self, times: np.ndarray, p: float) -> np.ndarray:
        out = np.ones(np.size(times))
        for f in self.factors:
            out *= f.pnorm_series(times, p)
        return out

    def values_at(self, t: float, points: np.ndarray) -> np.ndarray:
        """``F(t, x)`` at points of shape ``(k, d)``."""
        pts = np.atleast_2d(points)
        out = np.ones(pts.shape[0], dtype=complex)
        for i, f in enumerate(self.factors):
            out *= f.values_at(t, pts[:, i])
        return out

    def to_spectral(self, spec: WaveguideSpec, tag: str | None = None) -> SpectralField:
        """Sample the profile on the lattice of ``spec``."""
        if (spec.m, spec.n) != (self.m, self.n):
            raise DimensionError("geometry mismatch")
        grid = build_grid(spec)
        c = np.ones(spec.dims, dtype=complex)
        for i, f in enumerate(self.factors):
            c = c * grid.axis_view(f.spectral_samples(grid.freqs[i]), i)
        return SpectralField(spec, c, self.tag if tag is None else tag)


def log_level_measures(factor_moduli, log_lambdas: np.ndarray, bin_width: float = 2e-3) -> np.ndarray:
    """Measure of ``{x : prod_i |F_i(x_i)| > lambda}`` for each ``lambda``.

    Each factor contributes a weighted histogram of ``log|F_i|``; the
    histogram of the product's logarithm is their convolution.  Values too
    small to reach the lowest threshold are discarded.
    """
    logs, weights = [], []
    tops = []
    for v, w in factor_moduli:
        with np.errstate(divide="ignore"):
            lv = np.log(v)
        logs.append(lv)
        weights.append(w)
        tops.append(lv.max())
    lo_all = log_lambdas[0]
    hists, offsets = [], []
    for i, (lv, w) in enumerate(zip(logs, weights)):
        floor = lo_all - (sum(tops) - tops[i]) - bin_width
        keep = lv > floor
        if not keep.any():
            return np.zeros(log_lambdas.size)
        lvk = lv[keep]
        start = math.floor(floor / bin_width)
        idx = np.floor(lvk / bin_width).astype(np.int64) - start
        hists.append(np.bincount(idx, weights=w[keep]))
        offsets.append(start)
    conv = hists[0]
    for h in hists[1:]:
        conv = fftconvolve(conv, h) if conv.size * h.size > 4096 else np.convolve(conv, h)
    conv = np.maximum(conv, 0.0)
    base = sum(offsets)
    # bin j of the sum covers [(base + j) w, (base + j + len(h) ... ) w); use centres
    centres = (base + np.arange(conv.size) + 0.5 * len(hists)) * bin_width
    tail = np.cumsum(conv[::-1])[::-1]
    pos = np.searchsorted(centres, log_lambdas, side="right")
    out = np.zeros(log_lambdas.size)
    ok = pos < conv.size
    out[ok] = tail[pos[ok]]
    # the product never exceeds the product of the sampled factor maxima
    out[log_lambdas >= sum(tops)] = 0.0
    return out
