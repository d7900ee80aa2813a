from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wgl import core, nls
from wgl.errors import BlowupGuard, DomainError, ParameterOutOfRange

SPEC = nls.nls_spec(4.0)


def test_theta_and_omega_exact():
    assert nls.theta(4) == F(1, 1176)
    assert nls.omega(2, 4) == F(2352, 1177)
    assert nls.omega(2, 5) == 300
    assert nls.omega(F(3, 2), 5) == 150
    assert nls.omega(2.0, 4.0) == pytest.approx(2352 / 1177)


@given(st.floats(1.01, 10.0), st.floats(3.01, 4.99))
def test_omega_positive_and_linear_in_s(s, mu):
    w = nls.omega(s, mu)
    assert w > 0
    assert nls.omega(2 * s, mu) == pytest.approx(2 * w)


@pytest.mark.parametrize("s,mu", [(1, 4), (0.5, 4), (2, 3), (2, 5.5)])
def test_omega_domain(s, mu):
    with pytest.raises(DomainError):
        nls.omega(s, mu)


def test_omega_table_skips_outside():
    rows = nls.omega_table([2], [3, 4, 5])
    assert [r[1] for r in rows] == [4, 5]


def test_nls_spec_resolves_padded_band():
    spec = nls.nls_spec(16 / 1.5)
    assert spec.dims == (64, 32, 32)
    assert min(spec.max_freq) >= 16.0


def test_initial_data(rng):
    u = nls.initial_data(SPEC, 2.0, 0.7, rng)
    assert np.abs(core.fft_inverse(u.coeffs, SPEC)).max() == pytest.approx(0.7)
    assert nls.spectral_tail(u, 2.0) == 0.0


def _plane_wave(k, a):
    grid = core.build_grid(SPEC)
    c = np.zeros(SPEC.dims, dtype=complex)
    idx = tuple(int(np.argmin(np.abs(f - kk))) for f, kk in zip(grid.freqs, k))
    c[idx] = a / SPEC.dxi
    return core.SpectralField(SPEC, c), np.array([grid.freqs[i][j] for i, j in enumerate(idx)])


def test_plane_wave_closed_form():
    mu, a = 4.0, 0.8
    u0, k = _plane_wave((1.5, 2.0, -1.0), a)
    vol = SPEC.volume
    k2 = float(np.sum(k**2))
    assert nls.mass(u0) == pytest.approx(a * a * vol)
    expect = (0.5 * (2 * np.pi) ** 2 * k2 * a * a + a ** (mu + 1) / (mu + 1)) * vol
    assert nls.energy(u0, mu) == pytest.approx(expect, rel=1e-12)
    # split-step is exact on a plane wave
    st0 = nls.new_state(u0, mu, 1 / 256, 4.0)
    st1 = nls.evolve(st0, 64)
    phase = np.exp(-1j * st1.t * ((2 * np.pi) ** 2 * k2 + a ** (mu - 1)))
    assert np.allclose(st1.field.coeffs, u0.coeffs * phase, atol=1e-9 * np.abs(u0.coeffs).max())


def test_nonlinear_phase_preserves_modulus(rng):
    u = nls.initial_data(SPEC, 3.0, 2.0, rng)
    v = np.ascontiguousarray(core.fft_inverse(u.coeffs, SPEC))
    before = np.abs(v).copy()
    from wgl import kernels
    kernels.nonlinear_phase(v, 0.37, 3.0)
    assert np.allclose(np.abs(v), before, rtol=1e-13)


@pytest.fixture(scope="module")
def random_state():
    u0 = nls.initial_data(SPEC, 2.0, 1.0, np.random.default_rng(11))
    return nls.new_state(u0, 4.0, 1 / 256, 4.0)


def test_mass_conserved(random_state):
    st1 = nls.evolve(random_state, 256)
    assert st1.mass_drift < 1e-12
    assert st1.t == pytest.approx(1.0)


def test_time_reversible(random_state):
    fwd = nls.evolve(random_state, 128)
    back = nls.evolve(fwd, 128, dt=-random_state.dt)
    assert np.allclose(back.field.coeffs, random_state.field.coeffs,
                       atol=1e-9 * np.abs(random_state.field.coeffs).max())


def test_energy_error_second_order():
    u0 = nls.initial_data(SPEC, 2.0, 1.0, np.random.default_rng(12))
    drifts = []
    # the stiff top modes need dt * (2 pi band)^2 well below 1 before the rate shows
    for dt in (1 / 512, 1 / 1024):
        st = nls.evolve(nls.new_state(u0, 4.0, dt, 4.0), int(round(0.25 / dt)))
        drifts.append(st.energy_drift)
    assert 3.0 < drifts[0] / drifts[1] < 5.0


def test_step_and_blowup_guards(random_state):
    with pytest.raises(ParameterOutOfRange):
        nls.evolve(random_state, 1, dt=0.1)
    with pytest.raises(ParameterOutOfRange):
        nls.new_state(random_state.field, 4.0, 1 / 256, 100.0)
    with pytest.raises(DomainError):
        nls.new_state(random_state.field, 3.0, 1 / 256, 4.0)
    with pytest.raises(BlowupGuard):
        nls.evolve(random_state, 1, sup0=1e-12)


def test_fit_growth_synthetic():
    t = np.linspace(0, 100, 101)
    exp_, r2 = nls.fit_growth(t, 5.0 + 0.01 * t**0.5, 5.0)
    assert exp_ == pytest.approx(0.5, abs=1e-6) and r2 > 0.999
    assert nls.fit_growth(t, np.full(t.size, 5.0), 5.0) == (0.0, 1.0)


def test_trajectory_small_data():
    u0 = nls.initial_data(SPEC, 2.0, 1e-2, np.random.default_rng(13))
    rec, state = nls.run_trajectory(u0, 4.0, 2.0, 4.0, 1 / 64, 2.0)
    assert rec.passed and rec.exponent <= rec.omega
    assert len(state.series) == 5
    assert rec.max_mass_drift < 1e-12
    assert rec.as_dict()["horizon"] == 4.0
