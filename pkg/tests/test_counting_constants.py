from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wgl import constants as c
from wgl import counting as k
from wgl import fitting
from wgl.errors import DegenerateDesign, InsufficientSweep, RegimeError

# ---------------------------------------------------------------- counting


def test_r2_known_values():
    assert k.circle_count(0) == 1
    assert k.circle_count(3) == 0
    assert k.circle_count(25) == 12
    assert k.circle_count(65) == 16


@given(st.integers(0, 5000))
def test_r2_divisor_matches_loop(A):
    assert k.circle_count(A, "divisor") == k.circle_count(A, "loop")


def test_r2_table_matches_bruteforce():
    from wgl import _kernels_py as py
    assert np.array_equal(k.r2_table(3000), py.r2_bruteforce(3000))


def test_max_circle_count_N8():
    r = k.max_circle_count(8)
    assert (r["A"], r["r2"]) == (65, 16)


def test_x_measure_closed_form():
    assert k.x_measure(1, 0, 4, 8) == pytest.approx(2 * (math.sqrt(1.25) - math.sqrt(0.75)), rel=1e-12)
    assert k.x_measure(1, 0, 4, 8) == pytest.approx(0.504017, abs=1e-6)
    # capped by |xi| <= 2N
    assert k.x_measure(4 * 64, 0, 4, 8) == pytest.approx(2 * (16 - math.sqrt(256 - 0.25)))
    with pytest.raises(ValueError):
        k.x_measure(1, 0, 0.5, 8)


@given(st.floats(-60, 60), st.sampled_from([1.0, 4.0, 16.0]))
def test_annulus_matches_bruteforce(C, T):
    a = k.annulus_measure(C, T, 4)
    b = k.shell_measure_bruteforce(C, T, 4, samples=40001)
    assert a == pytest.approx(b, abs=2e-3 * 64)


def test_measure_sum_bounded():
    worst = max(r.ratio for r in k.measure_sweep(Ts=(1, 16), Ns=(8, 16)))
    assert 0 < worst < 10


def test_measure_sum_rejects_large_C():
    with pytest.raises(ValueError):
        k.measure_sum(1000.0, 1.0, 8)


# ---------------------------------------------------------------- constants


def test_c0_supercritical():
    tc = c.theory_constant("C0", 1, 2, 6, T=3, N=5)
    assert tc.regime == "supercritical"
    assert tc.exponents == (F(0), F(2, 3))
    assert tc.value == pytest.approx(5 ** (2 / 3))


def test_c0_regimes():
    assert c.theory_constant("C0", 1, 2, 3).regime == "subcritical"
    assert c.theory_constant("C0", 1, 2, 4).regime == "intermediate"


def test_c2_thresholds():
    br = c.branches("C2", 1, 2, F(7, 2))
    assert [b[1] for b in br] == [F(1, 8), F(1, 2), F(2), None]
    assert br[0][2].n_exp == F(1, 14)
    assert c.theory_constant("C2", 1, 2, F(7, 2), T=1.0, N=64.0).regime == "short"
    assert c.theory_constant("C2", 1, 2, F(7, 2), T=64.0**4, N=64.0).regime == "very-long"


def test_window_values():
    assert c.theory_constant("corollary-window", 1, 2, 5).value == 3.0
    assert c.theory_constant("corollary-window", 1, 2, F(7, 2)).window == F(1, 8)
    assert math.isinf(c.theory_constant("corollary-window", 1, 2, 7).value)


def test_regime_errors():
    with pytest.raises(RegimeError):
        c.theory_constant("C2", 1, 2, 5)
    with pytest.raises(RegimeError):
        c.theory_constant("C1", 1, 2, F(7, 2))
    with pytest.raises(RegimeError):
        c.theory_constant("p4", 1, 2, 5)
    with pytest.raises(ValueError):
        c.theory_constant("C9", 1, 2, 4)


def test_p4_bound():
    tc = c.theory_constant("p4", 1, 2, 4, T=16.0, N=8.0)
    assert tc.value == pytest.approx(16 ** 0.125 + 8 ** 0.25)


def test_as_fraction():
    assert c.as_fraction(3.5) == F(7, 2)
    assert c.as_fraction(10 / 3) == F(10, 3)
    assert c.as_fraction("18/5") == F(18, 5)


_PIECEWISE = st.sampled_from([("C1", (2, 1), F(10, 3), F(4)), ("C2", (1, 2), F(10, 3), F(4)),
                              ("C3", (1, 2), F(4), F(6))])


@given(_PIECEWISE, st.integers(1, 99))
def test_branches_continuous(src, j):
    name, mn, lo, hi = src
    p = lo + (hi - lo) * F(j, 100)
    assert all(row[3] for row in c.continuity_report(name, *mn, p))


@given(st.sampled_from([(1, 1), (1, 2), (2, 1)]), st.integers(1, 60))
def test_c0_continuous(mn, j):
    assert all(row[3] for row in c.continuity_report("C0", *mn, 2 + F(j, 10)))


@given(_PIECEWISE, st.integers(1, 99), st.integers(0, 40))
def test_upper_exponent_dominates_lower(src, j, i):
    name, (m, n), lo, hi = src
    p = lo + (hi - lo) * F(j, 100)
    tau = F(i, 8)
    upper = None
    for _, t_up, mono in c.branches(name, m, n, p):
        if t_up is None or tau <= t_up:
            upper = mono.at_threshold(tau)
            break
    lower = max(mono.at_threshold(tau) for mono in c.lower_exponents(m, n, p).values())
    assert upper >= lower


# ---------------------------------------------------------------- fitting


def test_fit_power_exact():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    fit = fitting.fit_power(x, 3 * x**0.25)
    assert fit.slopes[0] == pytest.approx(0.25) and fit.r2 == pytest.approx(1.0)
    assert math.exp(fit.intercept) == pytest.approx(3.0)


def test_fit_power2_recovers_exponents(rng):
    T, N = np.meshgrid([1.0, 4.0, 16.0, 64.0], [8.0, 16.0, 32.0, 64.0])
    y = T**0.125 * N**0.25 * np.exp(0.01 * rng.standard_normal(T.shape))
    fit = fitting.fit_power2(T.ravel(), N.ravel(), y.ravel())
    assert fit.slopes == pytest.approx((0.125, 0.25), abs=0.02)
    assert fit.r2 > 0.95


def test_fit_errors():
    with pytest.raises(InsufficientSweep):
        fitting.fit_power([1, 2, 3], [1, 2, 3])
    with pytest.raises(ValueError):
        fitting.fit_power([1, 2, 3, -4], [1, 2, 3, 4])
    x = np.array([1.0, 2.0, 4.0, 8.0])
    with pytest.raises(DegenerateDesign):
        fitting.fit_power2(x, x**2, x)
