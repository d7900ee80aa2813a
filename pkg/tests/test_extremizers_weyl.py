from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wgl import core, weyl
from wgl import extremizers as ex
from wgl.errors import InsufficientSweep, NyquistViolation, ParameterOutOfRange

# ------------------------------------------------------------ extremizers


def test_predicted_slopes_values():
    assert ex.predicted_slopes("phi1", 1, 2, 6.0) == pytest.approx((0.0, 2 / 3))
    assert ex.predicted_slopes("phi2", 1, 2, 4.0) == pytest.approx((1 / 8, 0.0))
    assert ex.predicted_slopes("phi3", 1, 2, 4.0) == pytest.approx((1 / 8, 0.0))
    assert ex.predicted_slopes("phi3", 2, 1, 6.0) == pytest.approx((-1 / 6, 0.0))
    with pytest.raises(ValueError):
        ex.predicted_slopes("phi9", 1, 2, 4.0)


@given(st.sampled_from([(1, 1), (1, 2), (2, 1)]), st.floats(2.0, 12.0))
def test_phi1_slope_is_scaling_exponent(mn, p):
    m, n = mn
    d = m + n
    assert ex.predicted_slopes("phi1", m, n, p)[1] == pytest.approx(d / 2 - (d + 2) / p)


def test_phi1_slope_measured():
    rows = ex.ratio_sweep("phi1", 6.0, [1.0], [2, 4, 8, 16])
    rep = ex.lower_bound_report("phi1", 6.0, rows)
    assert rep.passed and rep.slope == pytest.approx(2 / 3, abs=0.02)


def test_phi2_slope_measured():
    rows = ex.ratio_sweep("phi2", 4.0, [4, 16, 64], [4])
    rep = ex.lower_bound_report("phi2", 4.0, rows, axis="T", min_points=3)
    assert rep.slope == pytest.approx(0.125, abs=1e-3)


def test_lower_bound_report_needs_points():
    rows = ex.ratio_sweep("phi2", 4.0, [4, 16], [4])
    with pytest.raises(InsufficientSweep):
        ex.lower_bound_report("phi2", 4.0, rows, axis="T")


def test_realize_respects_support():
    spec = core.WaveguideSpec(1, 2, 64.0, (1024, 32, 32))
    fam = ex.build_phi3(4.0, 4.0, spec=spec)
    F = fam.realize(spec)
    assert ex.support_contained(F, fam.support)
    assert not ex.support_contained(F, ((0.0, 0.1), (0.0, 1.0), (0.0, 1.0)))


def test_builders_validate():
    with pytest.raises(ParameterOutOfRange):
        ex.build_phi2(0.5)
    with pytest.raises(NyquistViolation):
        ex.build_phi1(16.0, spec=core.WaveguideSpec(1, 2, 8.0, (64, 16, 16)))


# ------------------------------------------------------------ Weyl sums


def test_weyl_sum_at_zero_counts_cutoff_mass():
    # sum_k chi(k/16) equals the integral 3 * 16 up to Poisson tails
    assert weyl.weyl_sum(0.0, 0.0, 16).real == pytest.approx(48.0, abs=1e-9)


@given(st.floats(0.0, 1.0))
def test_weyl_half_shift(y):
    # k^2 = k mod 2
    assert weyl.weyl_sum(0.5, y, 8) == pytest.approx(weyl.weyl_sum(0.0, y + 0.5, 8), abs=1e-9)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_weyl_time_periodic(t, y):
    assert weyl.weyl_sum(t + 1.0, y, 8) == pytest.approx(weyl.weyl_sum(t, y, 8), abs=1e-8)


def test_weyl_sup_routes_agree():
    for t in (0.3712, 1 / 3, 0.01):
        assert weyl.weyl_sup(t, 16) == pytest.approx(weyl.weyl_sup(t, 16, method="direct"), rel=1e-12)


def test_weyl_envelope_check():
    rep = weyl.weyl_envelope_check(1, 3, 32, offsets=(0.0, 1e-3, 1e-2))
    assert rep.passed and len(rep.ratios) == 3
    with pytest.raises(ParameterOutOfRange):
        weyl.weyl_envelope_check(2, 4, 32)
    with pytest.raises(ParameterOutOfRange):
        weyl.weyl_envelope_check(1, 64, 32)


def test_rational_times():
    ts = weyl.rational_times(0.0, 1.0, qmax=3)
    assert np.allclose(ts, [1 / 3, 1 / 2, 2 / 3, 1.0])


# ------------------------------------------------------------ kernel


def test_line_kernel_limits():
    assert weyl.line_kernel_sup(0.0, 4.0) == pytest.approx(12.0, rel=1e-9)
    # stationary phase: |K(t, .)| -> (2t)^(-1/2) max chi
    assert weyl.line_kernel_sup(100.0, 4.0) == pytest.approx(1 / math.sqrt(200), rel=1e-3)


def test_kernel_at_zero_time():
    assert weyl.kernel_sup([0.0], 4.0, "RT2")[0] == pytest.approx(12.0**3, rel=1e-9)


def test_eval_kernel_routes_agree():
    spec = core.WaveguideSpec(1, 2, 4.0, (64, 16, 16))
    a = weyl.eval_kernel(0.05, 4.0, spec, "grid").values
    b = weyl.eval_kernel(0.05, 4.0, spec, "direct").values
    assert np.abs(a - b).max() <= 1e-3 * np.abs(a).max()


@pytest.mark.parametrize("variant", ["RT2", "R2T"])
def test_regime_bounds_continuous(variant):
    N = 16.0
    for t, r0, r1 in ((1 / N, 1, 2), (1.0, 2, 3)):
        assert weyl.regime_bound(t, N, variant, r0) == pytest.approx(weyl.regime_bound(t, N, variant, r1))
    assert weyl.regime_of([0.01, 0.5, 2.0], N).tolist() == [1, 2, 3]


def test_dispersive_envelope_small_N():
    rep = weyl.dispersive_check(8.0, "RT2")
    assert all(np.isfinite(v) and v > 0 for v in rep.constants.values())
    assert sum(rep.counts.values()) > 0
