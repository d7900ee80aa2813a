"""Split-step solver for the defocusing NLS ``i u_t + Lap u = |u|^(mu-1) u`` on R x T^2.

``Lap`` is the true Laplacian, with symbol ``-(2 pi |xi|)^2`` in the
``exp(2 pi i x.xi)`` convention, so the conserved energy is
``int 1/2 |grad u|^2 + |u|^(mu+1)/(mu+1)``.

The state lives on a grid whose maximal frequency is ``pad`` times the data
band.  Both Strang substeps are exact isometries on that grid, so mass is
conserved to rounding; no truncation is applied after the nonlinear step and
the spectral tail above the data band is reported as an aliasing monitor.
The Euclidean direction is periodized with length ``L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import kernels
from .core import SpectralField, WaveguideSpec, build_grid, fft_forward, fft_inverse, hs_norm
from .cutoffs import chi
from .errors import BlowupGuard, DomainError, ParameterOutOfRange
from .fitting import fit_power

__all__ = [
    "theta",
    "omega",
    "omega_table",
    "nls_spec",
    "initial_data",
    "mass",
    "energy",
    "NlsRunState",
    "new_state",
    "split_step",
    "evolve",
    "GrowthRecord",
    "fit_growth",
    "run_trajectory",
    "spectral_tail",
]

BLOWUP_FACTOR = 1e6


# ------------------------------------------------------------------- exponents


def theta(mu):
    """``|(mu-3)(5-mu)| / (2 (65 mu - 162)) * (6-mu)/(16-mu)``; exact for rational input."""
    if isinstance(mu, (int, Fraction)):
        mu = Fraction(mu)
    return abs((mu - 3) * (5 - mu)) / (2 * (65 * mu - 162)) * (6 - mu) / (16 - mu)


def omega(s, mu):
    """Growth exponent bound for ``||u(t)||_{H^s}``.

    ``s / (5 - mu + theta(mu))`` for ``3 < mu < 5`` and ``300 (s - 1)`` at
    ``mu = 5``.  Exact when ``s`` and ``mu`` are ``int`` or ``Fraction``.

    Raises
    ------
    DomainError
        Unless ``s > 1`` and ``3 < mu <= 5``.
    """
    if not s > 1:
        raise DomainError("need s > 1")
    if not 3 < mu <= 5:
        raise DomainError("need 3 < mu <= 5")
    if mu == 5:
        return 300 * (s - 1)
    exact = all(isinstance(v, (int, Fraction)) for v in (s, mu))
    if exact:
        return Fraction(s) / (5 - Fraction(mu) + theta(mu))
    return float(s) / (5.0 - float(mu) + float(theta(float(mu))))


def omega_table(ss, mus) -> list:
    """Rows ``(s, mu, theta, omega)``; entries outside the domain are skipped."""
    rows = []
    for s in ss:
        for mu in mus:
            try:
                w = omega(s, mu)
            except DomainError:
                continue
            th = theta(mu) if mu != 5 else None
            rows.append((s, mu, None if th is None else float(th), float(w)))
    return rows


# ---------------------------------------------------------------------- grids


def nls_spec(N: float, L: float = 2.0, pad: float = 1.5) -> WaveguideSpec:
    """Power-of-two R x T^2 grid whose largest frequency is at least ``pad * N``."""
    if pad < 1:
        raise ValueError("pad must be >= 1")
    dims = []
    for i in range(3):
        need = 2.0 * pad * N * (L if i == 0 else 1.0)
        dims.append(1 << int(math.ceil(math.log2(max(need, 2.0)))))
    return WaveguideSpec(1, 2, float(L), tuple(dims))


def initial_data(spec: WaveguideSpec, band: float, amplitude: float, rng: np.random.Generator,
                 tag: str = "nls0") -> SpectralField:
    """Random smooth data with spectrum in ``|xi| <= band`` and ``sup |u| = amplitude``."""
    grid = build_grid(spec)
    c = (rng.standard_normal(spec.dims) + 1j * rng.standard_normal(spec.dims)) * chi(2.0 * np.sqrt(grid.xi2) / band)
    u = fft_inverse(c, spec)
    c *= amplitude / np.abs(u).max()
    return SpectralField(spec, c, tag)


def spectral_tail(F: SpectralField, band: float) -> float:
    """Fraction of mass above ``|xi| = band``."""
    a2 = np.abs(F.coeffs) ** 2
    tot = a2.sum()
    return 0.0 if tot == 0 else float(a2[F.grid.xi2 > band * band].sum() / tot)


# ------------------------------------------------------------ conserved laws


def mass(u: SpectralField) -> float:
    """``int |u|^2``."""
    return float(np.sum(np.abs(u.coeffs) ** 2) * u.spec.dxi)


def energy(u: SpectralField, mu: float) -> float:
    """``int 1/2 |grad u|^2 + |u|^(mu+1) / (mu+1)``.

    Kinetic part spectrally, potential part by physical-space quadrature.
    """
    kin = 0.5 * (2.0 * np.pi) ** 2 * float(np.sum(u.grid.xi2 * np.abs(u.coeffs) ** 2)) * u.spec.dxi
    v = np.ascontiguousarray(fft_inverse(u.coeffs, u.spec))
    pot = kernels.abs_pow_sum(v, mu + 1.0) * u.spec.cell / (mu + 1.0)
    return kin + pot


# ----------------------------------------------------------------- stepping


@dataclass(frozen=True)
class NlsRunState:
    field: SpectralField
    t: float
    mu: float
    dt: float
    mass0: float
    energy0: float
    band: float
    series: tuple = ()       # (t, hs, mass_rel_drift, energy_rel_drift)

    @property
    def mass_drift(self) -> float:
        return abs(mass(self.field) - self.mass0) / self.mass0 if self.mass0 else 0.0

    @property
    def energy_drift(self) -> float:
        return abs(energy(self.field, self.mu) - self.energy0) / abs(self.energy0) if self.energy0 else 0.0


def _check_step(dt: float, band: float):
    if abs(dt) * band * band > 0.25 + 1e-12:
        raise ParameterOutOfRange(f"|dt| * N^2 = {abs(dt) * band * band:.3g} exceeds 1/4")


def new_state(u0: SpectralField, mu: float, dt: float, band: float) -> NlsRunState:
    """Initial state; ``band`` is the cutoff used in the step-size condition."""
    if not 3 < mu <= 5:
        raise DomainError("need 3 < mu <= 5")
    grid_band = min(u0.spec.max_freq)
    if band > grid_band:
        raise ParameterOutOfRange(f"band {band} exceeds the grid's largest frequency {grid_band}")
    _check_step(dt, band)
    return NlsRunState(u0, 0.0, float(mu), float(dt), mass(u0), energy(u0, mu), float(band))


class _Stepper:
    # Physical-space Strang loop; consecutive half nonlinear phases are fused.
    def __init__(self, spec: WaveguideSpec, mu: float, dt: float):
        self.spec = spec
        self.power = mu - 1.0
        self.dt = dt
        self.lin = np.exp(-2j * np.pi * (2.0 * np.pi * dt) * build_grid(spec).xi2)

    def run(self, v: np.ndarray, steps: int, sup_limit: float) -> np.ndarray:
        ax = tuple(range(-self.spec.d, 0))
        fft, ifft = np.fft.fftn, np.fft.ifftn
        v = np.ascontiguousarray(v, dtype=complex)
        kernels.nonlinear_phase(v, 0.5 * self.dt, self.power)
        for i in range(steps):
            v = np.ascontiguousarray(ifft(fft(v, axes=ax) * self.lin, axes=ax))
            last = i == steps - 1
            kernels.nonlinear_phase(v, (0.5 if last else 1.0) * self.dt, self.power)
        if not np.all(np.isfinite(v)) or np.abs(v).max() > sup_limit:
            raise BlowupGuard(f"sup |u| exceeded {sup_limit:.3g}")
        return v


def evolve(state: NlsRunState, steps: int, dt: float | None = None, sup0: float | None = None) -> NlsRunState:
    """Advance ``steps`` Strang steps (negative ``dt`` runs backward).

    Raises
    ------
    BlowupGuard
        If ``sup |u|`` exceeds ``1e6`` times ``sup0`` (default: the current sup).
    """
    dt = state.dt if dt is None else float(dt)
    _check_step(dt, state.band)
    if steps <= 0:
        return state
    spec = state.field.spec
    v = fft_inverse(state.field.coeffs, spec)
    ref = float(np.abs(v).max()) if sup0 is None else sup0
    v = _Stepper(spec, state.mu, dt).run(v, int(steps), BLOWUP_FACTOR * max(ref, 1e-300))
    return replace(state, field=state.field.with_coeffs(fft_forward(v, spec)), t=state.t + steps * dt)


def split_step(state: NlsRunState, dt: float | None = None) -> NlsRunState:
    """One Strang step: half nonlinear phase, linear flow over ``dt``, half nonlinear phase."""
    return evolve(state, 1, dt)


# -------------------------------------------------------------------- growth


@dataclass(frozen=True)
class GrowthRecord:
    s: float
    mu: float
    A: float                 # ||u(0)||_{H^s}
    measured_max: float
    exponent: float
    r2: float
    omega: float
    passed: bool
    horizon: float
    max_mass_drift: float
    max_energy_drift: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def fit_growth(ts, hs, A: float, rel_floor: float = 1e-9) -> tuple:
    """Log-log slope of ``max-so-far(hs) - A`` against ``t`` over the second half.

    Increments below ``rel_floor * A`` count as no growth; if none remain the
    exponent is 0.  Returns ``(exponent, r2)``.
    """
    ts = np.asarray(ts, dtype=float)
    env = np.maximum.accumulate(np.asarray(hs, dtype=float))
    half = ts >= 0.5 * ts[-1]
    x, y = ts[half], env[half] - A
    keep = (x > 0) & (y > rel_floor * A)
    if keep.sum() < 2 or np.unique(y[keep]).size < 2:
        return 0.0, 1.0
    f = fit_power(x[keep], y[keep], min_points=2, axis="t")
    return float(f.slopes[0]), float(f.r2)


def run_trajectory(u0: SpectralField, mu: float, s: float, horizon: float, dt: float, band: float,
                   slack: float = 0.2, checkpoint: float = 1.0) -> tuple:
    """Evolve to ``horizon``, recording ``(t, H^s, mass drift, energy drift)`` at each checkpoint.

    Returns ``(GrowthRecord, NlsRunState)``; the state carries the series.
    The record passes iff the fitted exponent is at most ``omega(s, mu) + slack``.
    """
    state = new_state(u0, mu, dt, band)
    per = checkpoint / dt
    if abs(per - round(per)) > 1e-9 * per:
        raise ParameterOutOfRange("dt must divide the checkpoint interval")
    per = int(round(per))
    nchk = int(round(horizon / checkpoint))
    sup0 = float(np.abs(fft_inverse(u0.coeffs, u0.spec)).max())
    A = hs_norm(u0, s)
    series = [(0.0, A, 0.0, 0.0)]
    for _ in range(nchk):
        state = evolve(state, per, sup0=sup0)
        series.append((state.t, hs_norm(state.field, s), state.mass_drift, state.energy_drift))
    state = replace(state, series=tuple(series))
    arr = np.asarray(series)
    exp_, r2 = fit_growth(arr[:, 0], arr[:, 1], A)
    w = float(omega(s, mu))
    rec = GrowthRecord(float(s), float(mu), A, float(arr[:, 1].max()), exp_, r2, w, exp_ <= w + slack,
                       float(horizon), float(arr[:, 2].max()), float(arr[:, 3].max()))
    return rec, state
