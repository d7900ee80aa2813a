from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from wgl import _kernels_py as py
from wgl import kernels
from wgl.cutoffs import chi, chi_box, dn_symbol, psi, smoothstep5
from wgl.quadrature import QuadratureSpec
from wgl.errors import ParameterOutOfRange

try:
    from wgl import _kernels as cy
except ImportError:  # pragma: no cover
    cy = None

needs_cy = pytest.mark.skipif(cy is None, reason="compiled extension not built")


# ---------------------------------------------------------------- cutoffs


def test_chi_plateau_and_support():
    x = np.linspace(-3, 3, 6001)
    v = chi(x)
    assert np.all(v[np.abs(x) <= 1] == 1.0)
    assert np.all(v[np.abs(x) >= 2] == 0.0)
    assert np.all((v >= 0) & (v <= 1))


def test_chi_integral_is_three():
    val, err = quad(lambda s: float(chi(s)), -2.5, 2.5, points=[-2, -1, 1, 2], limit=200)
    assert val == pytest.approx(3.0, abs=1e-10)


@given(st.floats(1.0, 2.0))
def test_chi_transition_is_antisymmetric(x):
    assert chi(x) + chi(3.0 - x) == pytest.approx(1.0, abs=1e-14)


@given(st.floats(-5, 5), st.floats(-3, 3), st.floats(0.1, 4))
def test_chi_box_is_one_on_interval(u, lo, width):
    hi = lo + width
    x = lo + (hi - lo) * (u % 1.0)
    assert chi_box(x, lo, hi) == 1.0


def test_smoothstep_endpoints():
    assert smoothstep5(0.0) == 0.0 and smoothstep5(1.0) == 1.0
    assert smoothstep5(0.5) == pytest.approx(0.5)


@given(st.floats(0, 8), st.floats(0.0, 3.0))
def test_dn_symbol_regimes(y, s):
    g = float(dn_symbol(y, s))
    if y <= 1:
        assert g == 1.0
    elif y >= 2:
        assert g == pytest.approx(y ** (s - 1.0), rel=1e-12)
    else:
        lo, hi = sorted((1.0, y ** (s - 1.0)))
        assert lo - 1e-12 <= g <= hi + 1e-12


def test_psi_window_properties():
    t = np.linspace(-1, 1, 401)
    assert psi(t).min() >= 1.01 - 1e-9
    assert np.all(psi(np.array([-2.5, -2.0, 2.0, 2.5])) == 0.0)
    # Fourier transform is a square, hence nonnegative
    grid = np.linspace(-2, 2, 8001)
    vals = psi(grid)
    h = grid[1] - grid[0]
    for tau in (0.0, 0.3, 0.7, 1.3, 2.9):
        ft = np.sum(vals * np.cos(2 * np.pi * tau * grid)) * h
        assert ft > -1e-6


# ---------------------------------------------------------------- kernels


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_r2_bruteforce_oracle():
    r = py.r2_bruteforce(30)
    assert r[0] == 1 and r[1] == 4 and r[3] == 0 and r[25] == 12 and r[5] == 8


def test_level_counts_python():
    a = np.array([0.5, 1.5, 2.5, 3.5])
    lam = np.array([1.0, 2.0, 3.0])
    out = py.level_counts(a, lam, 2.0, np.zeros(3))
    assert out.tolist() == [6.0, 4.0, 2.0]


def test_weyl_direct_matches_sum():
    ks = np.arange(-5, 6)
    w = np.ones(ks.size)
    ys = np.array([0.0, 0.1, 0.37])
    ref = [np.sum(np.exp(2j * np.pi * (y * ks - 0.2 * ks * ks))) for y in ys]
    assert np.allclose(py.weyl_direct(ks, w, 0.2, ys), ref, atol=1e-12)


@needs_cy
@pytest.mark.parametrize("power", [1.0, 2.0, 3.0, 4.0, 2.5])
def test_backend_parity_nonlinear_phase(rng, power):
    u = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    a, b = u.copy(), u.copy()
    cy.nonlinear_phase(a, 0.3, power)
    py.nonlinear_phase(b, 0.3, power)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.allclose(np.abs(a), np.abs(u), rtol=1e-13)


@needs_cy
@pytest.mark.parametrize("p", [2.0, 3.0, 4.0, 5.0, 6.0, 3.5, 10 / 3])
def test_backend_parity_abs_pow_sum(rng, p):
    u = rng.standard_normal((40, 50)) + 1j * rng.standard_normal((40, 50))
    assert cy.abs_pow_sum(u, p) == pytest.approx(py.abs_pow_sum(u, p), rel=1e-12)


@needs_cy
def test_backend_parity_level_counts(rng):
    a = np.abs(rng.standard_normal(5000))
    lam = np.geomspace(1e-3, 3, 64)
    x = cy.level_counts(a, lam, 0.5, np.zeros(64))
    y = py.level_counts(a, lam, 0.5, np.zeros(64))
    assert np.array_equal(x, y)


@needs_cy
def test_backend_parity_weyl_and_r2():
    ks = np.arange(-64, 65)
    w = np.exp(-(ks / 32.0) ** 2)
    ys = np.linspace(0, 1, 257)
    assert np.allclose(cy.weyl_direct(ks, w, 0.3712, ys), py.weyl_direct(ks, w, 0.3712, ys), atol=1e-10)
    assert np.array_equal(cy.r2_bruteforce(2000), py.r2_bruteforce(2000))


# ---------------------------------------------------------------- quadrature


def test_quadrature_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(1.0, 0.3)
    with pytest.raises(ValueError):
        QuadratureSpec(1.0, 0.25, refine=1)
    with pytest.raises(ValueError):
        QuadratureSpec(-1.0, 0.25)


@given(st.floats(0.1, 50), st.floats(1, 64))
def test_for_band_resolves_band(T, band):
    q = QuadratureSpec.for_band(T, band)
    assert q.steps * q.dt == pytest.approx(T)
    q.check_band(band)


def test_check_band_raises():
    with pytest.raises(ParameterOutOfRange):
        QuadratureSpec(1.0, 0.5).check_band(4.0)


def test_weights_integrate_polynomials():
    q = QuadratureSpec(2.0, 0.25, t0=1.0, refine=4)
    t = q.fine_times()
    assert t[0] == 1.0 and t[-1] == pytest.approx(3.0)
    for w in (q.fine_weights(), q.coarse_weights()):
        assert np.sum(w) == pytest.approx(2.0)
        assert np.sum(w * t) == pytest.approx(4.0)
    assert np.count_nonzero(q.coarse_weights()) == q.steps + 1
