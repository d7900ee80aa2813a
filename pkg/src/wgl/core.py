"""Grids, transforms, projectors and the free propagator on R^m x T^n.

Conventions
-----------
Euclidean directions are periodized to a box of length ``L`` and carry the
frequencies ``j / L``; torus directions have circumference 1 and carry integer
frequencies.  Transforms follow

    f_hat(xi) = int f(x) exp(-2 pi i x.xi) dx,
    f(x)      = int f_hat(xi) exp(2 pi i x.xi) dxi,

where ``dxi`` is ``1/L`` per Euclidean frequency and counting measure on the
torus lattice, so the pair is unitary on the grid.  The free evolution is the
multiplier ``exp(-2 pi i t |xi|^2)``.

Arrays are stored in FFT order.  Sample ``j`` of a Euclidean axis sits at
``x = j L / M`` taken modulo ``L`` into ``[-L/2, L/2)``, so data centred at the
origin stays away from the box edge.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.fft as sfft

from .cutoffs import chi, dn_symbol
from .errors import DimensionError, NyquistViolation, ShapeMismatch, WrapAroundWarning


def _is_pow2(k: int) -> bool:
    return k > 0 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class WaveguideSpec:
    """Geometry of a periodized waveguide ``R^m x T^n``.

    Parameters
    ----------
    m, n : int
        Number of Euclidean and torus directions (``m, n >= 1``, ``m + n`` in
        {2, 3}).
    L : float
        Periodization length of each Euclidean direction.
    dims : tuple of int
        Samples per direction, Euclidean axes first.  Powers of two.
    """

    m: int
    n: int
    L: float
    dims: tuple

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if self.m < 1 or self.n < 1 or self.m + self.n not in (2, 3):
            raise DimensionError(f"need m, n >= 1 and m + n in {{2, 3}}, got m={self.m}, n={self.n}")
        if len(self.dims) != self.m + self.n:
            raise DimensionError(f"dims has {len(self.dims)} entries, expected {self.m + self.n}")
        if not all(_is_pow2(d) for d in self.dims):
            raise DimensionError(f"dims must be powers of two, got {self.dims}")
        if not self.L > 0:
            raise DimensionError("box length must be positive")

    @property
    def d(self) -> int:
        return self.m + self.n

    @property
    def max_freq(self) -> tuple:
        """Largest representable frequency magnitude per direction."""
        return tuple(
            (M / (2.0 * self.L)) if i < self.m else (M / 2.0) for i, M in enumerate(self.dims)
        )

    @property
    def nyquist(self) -> float:
        return min(self.max_freq)

    @property
    def volume(self) -> float:
        return float(self.L) ** self.m

    @property
    def cell(self) -> float:
        """Physical cell volume."""
        v = 1.0
        for i, M in enumerate(self.dims):
            v *= (self.L / M) if i < self.m else (1.0 / M)
        return v

    @property
    def dxi(self) -> float:
        """Spectral cell measure."""
        return float(self.L) ** (-self.m)

    def check_cutoff(self, N: float) -> None:
        """Raise NyquistViolation unless every direction resolves ``2 N``."""
        for i, nmax in enumerate(self.max_freq):
            if nmax < 2.0 * N:
                kind = "Euclidean" if i < self.m else "torus"
                raise NyquistViolation(
                    f"cutoff N={N} needs max frequency >= {2 * N} but {kind} axis {i} resolves {nmax}"
                )

    @classmethod
    def for_cutoff(cls, m: int, n: int, N: float, L: float, oversample: int = 1) -> "WaveguideSpec":
        """Smallest power-of-two grid that resolves ``2 N`` in every direction."""
        dims = []
        for i in range(m + n):
            need = 4.0 * N * (L if i < m else 1.0) * oversample
            dims.append(1 << int(np.ceil(np.log2(max(need, 2.0)))))
        return cls(m, n, L, tuple(dims))


def default_box_length(N: float, T_max: float, diameter: float = 0.0) -> float:
    """Box length that keeps a frequency-``2N`` packet clear of the edge up to ``T_max``."""
    return 8.0 * np.pi * N * T_max + 16.0 * np.sqrt(T_max) + 10.0 * diameter


@dataclass(frozen=True, eq=False)
class Grid:
    spec: WaveguideSpec
    freqs: tuple          # per-axis 1D frequency arrays (FFT order)
    coords: tuple         # per-axis 1D coordinates (FFT order, centred)
    xi2: np.ndarray       # |xi|^2 on the full lattice
    cell: float
    dxi: float

    @property
    def shape(self) -> tuple:
        return self.spec.dims

    @property
    def size(self) -> int:
        return int(np.prod(self.spec.dims))

    def axis_view(self, arr, axis):
        sh = [1] * self.spec.d
        sh[axis] = -1
        return np.reshape(arr, sh)

    def abs_xi(self) -> np.ndarray:
        return np.sqrt(self.xi2)

    def edge_mask(self, frac: float = 1.0 / 16.0) -> np.ndarray:
        """Cells within ``frac * L`` of the Euclidean box edge."""
        mask = np.zeros(self.spec.dims, dtype=bool)
        L = self.spec.L
        for i in range(self.spec.m):
            near = np.abs(self.coords[i]) >= L / 2.0 - frac * L
            mask |= self.axis_view(near, i)
        return mask


@lru_cache(maxsize=32)
def _grid_cached(spec: WaveguideSpec) -> Grid:
    freqs, coords = [], []
    for i, M in enumerate(spec.dims):
        if i < spec.m:
            freqs.append(sfft.fftfreq(M, d=spec.L / M))
            coords.append(sfft.fftfreq(M, d=1.0 / spec.L))
        else:
            freqs.append(sfft.fftfreq(M, d=1.0 / M))
            coords.append(sfft.fftfreq(M, d=1.0))
    xi2 = np.zeros(spec.dims)
    for i, f in enumerate(freqs):
        sh = [1] * spec.d
        sh[i] = -1
        xi2 = xi2 + np.reshape(f, sh) ** 2
    for a in freqs + coords:
        a.setflags(write=False)
    xi2.setflags(write=False)
    return Grid(spec, tuple(freqs), tuple(coords), xi2, spec.cell, spec.dxi)


def build_grid(spec: WaveguideSpec, cutoffs: Sequence[float] = ()) -> Grid:
    """Frequency lattice, coordinates and quadrature weights for ``spec``.

    Every declared projector cutoff is checked against the per-direction
    Nyquist frequency.
    """
    for N in cutoffs:
        spec.check_cutoff(N)
    return _grid_cached(spec)


@dataclass(frozen=True, eq=False)
class SpectralField:
    spec: WaveguideSpec
    coeffs: np.ndarray
    tag: str = ""

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.spec.dims:
            raise ShapeMismatch(f"coefficients of shape {c.shape} on grid {self.spec.dims}")
        object.__setattr__(self, "coeffs", c)

    @property
    def grid(self) -> Grid:
        return build_grid(self.spec)

    def with_coeffs(self, coeffs, tag=None) -> "SpectralField":
        return SpectralField(self.spec, coeffs, self.tag if tag is None else tag)

    def __mul__(self, c):
        return self.with_coeffs(self.coeffs * c)

    __rmul__ = __mul__

    def __add__(self, other: "SpectralField"):
        _same_spec(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField"):
        _same_spec(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def conj_physical(self) -> "SpectralField":
        """Spectral field of the complex conjugate of the physical field."""
        c = np.conj(self.coeffs)
        for ax in range(c.ndim):
            c = np.roll(np.flip(c, axis=ax), 1, axis=ax)
        return self.with_coeffs(c)

    def band(self, rel: float = 0.0) -> float:
        """Largest ``|xi|`` carrying a coefficient above ``rel * max|coeff|``."""
        a = np.abs(self.coeffs)
        top = a.max()
        if top == 0:
            return 0.0
        return float(np.sqrt(self.grid.xi2[a > rel * top].max()))


@dataclass(frozen=True, eq=False)
class PhysicalField:
    spec: WaveguideSpec
    values: np.ndarray
    tag: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.spec.dims:
            raise ShapeMismatch(f"samples of shape {v.shape} on grid {self.spec.dims}")
        object.__setattr__(self, "values", v)

    @property
    def grid(self) -> Grid:
        return build_grid(self.spec)


def _same_spec(a, b):
    if a.spec != b.spec:
        raise ShapeMismatch("fields live on different grids")


def _fwd_scale(spec: WaveguideSpec) -> float:
    return spec.cell


def _inv_scale(spec: WaveguideSpec) -> float:
    return 1.0 / spec.cell


def fft_forward(values: np.ndarray, spec: WaveguideSpec, axes=None) -> np.ndarray:
    ax = tuple(range(-spec.d, 0)) if axes is None else axes
    return sfft.fftn(values, axes=ax) * _fwd_scale(spec)


def fft_inverse(coeffs: np.ndarray, spec: WaveguideSpec, axes=None) -> np.ndarray:
    ax = tuple(range(-spec.d, 0)) if axes is None else axes
    return sfft.ifftn(coeffs, axes=ax) * _inv_scale(spec)


def forward_transform(f: PhysicalField) -> SpectralField:
    return SpectralField(f.spec, fft_forward(f.values, f.spec), f.tag)


def inverse_transform(F: SpectralField) -> PhysicalField:
    return PhysicalField(F.spec, fft_inverse(F.coeffs, F.spec), F.tag)


def projector_symbol(grid: Grid, N: float, mode: str = "smooth") -> np.ndarray:
    """Multiplier of ``P_{<=N}`` on the lattice.

    ``sharp`` keeps ``|xi| <= N``; ``smooth`` multiplies by ``chi(|xi|/N)``;
    ``box`` multiplies by ``prod_i chi(xi_i/N)``, the cutoff used in the kernel
    ``K_N``.  ``box`` factorizes over directions, which the separable engine
    relies on.
    """
    if mode == "sharp":
        return (grid.xi2 <= N * N).astype(float)
    if mode == "smooth":
        return chi(np.sqrt(grid.xi2) / N)
    if mode == "box":
        out = np.ones(grid.spec.dims)
        for i, f in enumerate(grid.freqs):
            out = out * grid.axis_view(chi(f / N), i)
        return out
    raise ValueError(f"unknown projector mode {mode!r}")


def project_leq_N(F: SpectralField, N: float, mode: str = "smooth") -> SpectralField:
    grid = build_grid(F.spec, cutoffs=(N,))
    return F.with_coeffs(F.coeffs * projector_symbol(grid, N, mode))


def apply_dn(F: SpectralField, N: float, s: float) -> SpectralField:
    """Fourier multiplier ``g(xi/N)`` interpolating 1 and ``|xi/N|^(s-1)``."""
    if s < 1:
        raise ValueError("D_N needs s >= 1")
    return F.with_coeffs(F.coeffs * dn_symbol(F.grid.abs_xi() / N, s))


def phase(grid: Grid, t: float) -> np.ndarray:
    return np.exp(-2j * np.pi * t * grid.xi2)


def propagate(F: SpectralField, t: float) -> SpectralField:
    """Free evolution ``exp(-2 pi i t |xi|^2)`` applied to spectral data."""
    if t == 0:
        return F
    return F.with_coeffs(F.coeffs * phase(F.grid, t))


def l2_norm(F) -> float:
    if isinstance(F, PhysicalField):
        return float(np.sqrt(np.sum(np.abs(F.values) ** 2) * F.spec.cell))
    if isinstance(F, SpectralField):
        return float(np.sqrt(np.sum(np.abs(F.coeffs) ** 2) * F.spec.dxi))
    return F.l2_norm()


def hs_norm(F: SpectralField, s: float) -> float:
    """Sobolev norm with weight ``<xi>^(2s) = (1 + |xi|^2)^s``."""
    w = (1.0 + F.grid.xi2) ** s
    return float(np.sqrt(np.sum(w * np.abs(F.coeffs) ** 2) * F.spec.dxi))


def inner(F: SpectralField, G: SpectralField) -> complex:
    _same_spec(F, G)
    return complex(np.vdot(G.coeffs, F.coeffs) * F.spec.dxi)


def edge_mass_fraction(values: np.ndarray, grid: Grid, frac: float = 1.0 / 16.0) -> float:
    a2 = np.abs(values) ** 2
    tot = a2.sum()
    if tot == 0:
        return 0.0
    return float(a2[grid.edge_mask(frac)].sum() / tot)


def check_wraparound(values: np.ndarray, grid: Grid, threshold: float = 1e-6, where: str = "") -> float:
    """Warn when more than ``threshold`` of the mass sits near the box edge."""
    frac = edge_mass_fraction(values, grid)
    if frac > threshold:
        warnings.warn(
            f"{frac:.3g} of the mass lies within L/16 of the box edge{where}",
            WrapAroundWarning,
            stacklevel=3,
        )
    return frac


def random_field(spec: WaveguideSpec, N: float, rng: np.random.Generator, tag: str = "gauss") -> SpectralField:
    """Complex Gaussian coefficients on the lattice points with ``|xi| <= N``."""
    grid = build_grid(spec)
    c = rng.standard_normal(spec.dims) + 1j * rng.standard_normal(spec.dims)
    c *= grid.xi2 <= N * N
    return SpectralField(spec, c, tag)
