from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgl import core, norms
from wgl.errors import GridTooCoarse, InsufficientRange, LocalizationWarning, ZeroData
from wgl.separable import ProductField, RealLineFactor, TorusFactor


def _product():
    return ProductField((
        RealLineFactor.box(-1, 1),
        TorusFactor([-1, 0, 2], [1, 0.5j, 0.3]),
        TorusFactor([0, 1], [1, -0.4]),
    ))


SPEC = core.WaveguideSpec(1, 2, 32.0, (512, 16, 16))
QUAD = norms.QuadratureSpec(0.25, 1 / 128)


@pytest.mark.parametrize("p", [4.0, 6.0, 10 / 3])
def test_separable_engine_matches_grid(p):
    pf = _product()
    a = norms.lp_spacetime_norm(pf, p, QUAD, None).value
    b = norms.lp_spacetime_norm(pf.to_spectral(SPEC), p, QUAD, None).value
    assert a == pytest.approx(b, rel=1e-5)


def test_product_l2_matches_grid():
    pf = _product()
    assert pf.l2_norm() == pytest.approx(core.l2_norm(pf.to_spectral(SPEC)), rel=1e-9)


def test_torus_l4_exact():
    # on the circle k1+k2=k3+k4 with equal energies forces {k1,k2}={k3,k4}
    rng = np.random.default_rng(3)
    ks = np.array([-3, -1, 0, 2, 5])
    c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    f = TorusFactor(ks, c)
    q = norms.QuadratureSpec(1.0, 1 / 64, refine=4)
    s = f.pnorm_series(q.fine_times(), 4.0)
    a2 = np.abs(c) ** 2
    exact = 2 * a2.sum() ** 2 - (a2**2).sum()
    assert np.dot(q.fine_weights(), s) == pytest.approx(exact, rel=1e-10)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 2.0))
def test_p2_norm_is_mass_times_time(T):
    # the flow is unitary, so the L^2 space-time norm squared is T ||phi||^2
    rng = np.random.default_rng(1)
    spec = core.WaveguideSpec(1, 1, 16.0, (256, 16))
    phi = core.random_field(spec, 3.0, rng)
    q = norms.QuadratureSpec.for_band(T, 3.0)
    r = norms.strichartz_ratio(phi, 2.0, T, None, quad=q, check_wrap=False)
    assert r == pytest.approx(np.sqrt(T), rel=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(0.0, 6.28))
def test_ratio_scale_invariant(c, theta):
    pf = _product()
    r0 = norms.strichartz_ratio(pf, 4.0, 0.25, None, quad=QUAD)
    r1 = norms.strichartz_ratio(pf.scaled(c * np.exp(1j * theta)), 4.0, 0.25, None, quad=QUAD)
    assert r1 == pytest.approx(r0, rel=1e-9)


def test_zero_data_raises():
    with pytest.raises(ZeroData):
        norms.strichartz_ratio(core.SpectralField(SPEC, np.zeros(SPEC.dims, complex)), 4.0, 1.0, 4.0)


def test_lp_rejects_small_p():
    with pytest.raises(ValueError):
        norms.lp_spacetime_norm(_product(), 1.5, QUAD, None)


def test_refinement_estimate_small():
    res = norms.lp_spacetime_norm(_product(), 4.0, QUAD, None)
    assert res.err_est < 1e-3


def test_ratio_record_columns():
    row = norms.ratio_record(_product(), 4.0, 0.25, 2.0, quad=QUAD)
    assert tuple(row) == norms.RATIO_COLUMNS
    assert (row["m"], row["n"]) == (1, 2)


# ---------------------------------------------------------------- level sets


@pytest.fixture(scope="module")
def grid_profile():
    rng = np.random.default_rng(5)
    spec = core.WaveguideSpec(1, 2, 8.0, (128, 16, 16))
    phi = core.random_field(spec, 4.0, rng)
    q = norms.default_quadrature(phi, 0.25, 4.0)
    return phi, q, norms.level_set_profile(phi, 0.25, 4.0, quad=q)


def test_level_measures_nonincreasing(grid_profile):
    _, _, pr = grid_profile
    assert np.all(np.diff(pr.measures) <= 1e-12)
    assert pr.measures[-1] == 0.0
    assert pr.measures[0] <= pr.volume * (1 + 1e-12)


@pytest.mark.parametrize("p", [10 / 3, 4.0, 6.0])
def test_layer_cake_matches_direct(grid_profile, p):
    phi, q, pr = grid_profile
    direct = norms.lp_spacetime_norm(phi, p, q, 4.0, check_wrap=False).coarse / core.l2_norm(phi)
    assert norms.layer_cake_norm(pr, p) == pytest.approx(direct, rel=1e-2)


def test_layer_cake_separable_matches_direct():
    pf = _product()
    pr = norms.level_set_profile(pf, 0.25, None, quad=QUAD)
    direct = norms.lp_spacetime_norm(pf, 6.0, QUAD, None).coarse / pf.l2_norm()
    assert norms.layer_cake_norm(pr, 6.0) == pytest.approx(direct, rel=1e-2)


def test_layer_cake_needs_top_threshold(grid_profile):
    _, _, pr = grid_profile
    cut = norms.LevelSetProfile(pr.lambdas[:10], pr.measures[:10], pr.volume, pr.mass, pr.T, pr.N,
                                pr.lambda_max)
    with pytest.raises(GridTooCoarse):
        norms.layer_cake_norm(cut, 4.0)


def test_level_profile_validation():
    with pytest.raises(ValueError):
        norms.LevelSetProfile(np.array([2.0, 1.0]), np.zeros(2), 1.0, 1.0, 1.0, None, 1.0)


def test_decay_fit(grid_profile):
    _, _, pr = grid_profile
    fit = norms.levelset_decay_fit(pr, 10 / 3, 0.1 * pr.lambda_max)
    lam = pr.lambdas[pr.lambdas > 0.1 * pr.lambda_max]
    assert fit.constant >= 0 and fit.argmax in lam
    with pytest.raises(InsufficientRange):
        norms.levelset_decay_fit(pr, 10 / 3, pr.lambda_max)


# ---------------------------------------------------------------- S-norms


def _shell_field(N):
    spec = core.WaveguideSpec(1, 2, 8.0, (128, 32, 32))
    grid = core.build_grid(spec)
    r = np.sqrt(grid.xi2)
    c = np.where((r > N / 2) & (r < 2 * N), 1.0 + 0j, 0.0)
    return core.SpectralField(spec, c)


def test_s_norm_monotone_in_interval():
    phi = _shell_field(4.0)
    a = norms.s_norm(phi, 4.0, 4.0, 6.0, (0.0, 1.0), factor=2.0)
    b = norms.s_norm(phi, 4.0, 4.0, 6.0, (0.0, 2.0), factor=2.0)
    assert b >= a > 0


def test_s_norm_max_dominates():
    phi = _shell_field(4.0)
    J = (0.0, 1.0)
    mx = norms.s_norm_max(phi, 4.0, 4.0, J, factor=2.0)
    for qt in (5.0, 12.0):
        assert mx >= norms.s_norm(phi, 4.0, 4.0, qt, J, factor=2.0) * (1 - 1e-12)


def test_s_norm_from_pieces_weights():
    assert norms.s_norm_from_pieces([1.0, 1.0], 16.0, 4.0, 10.0) == pytest.approx(2 ** 0.25)


def test_s_norm_parameter_range_and_warning():
    phi = _shell_field(4.0)
    with pytest.raises(ValueError):
        norms.s_norm(phi, 4.0, 3.0, 6.0, (0.0, 1.0))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        norms.s_norm(phi, 0.5, 4.0, 6.0, (0.0, 1.0), factor=2.0)
    assert any(issubclass(x.category, LocalizationWarning) for x in w)
