from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgl import core, optimizer as opt
from wgl.errors import BudgetExceeded, InsufficientSweep, ParameterOutOfRange, ShapeMismatch, ZeroData
from wgl.quadrature import QuadratureSpec

SPEC = core.WaveguideSpec(1, 1, 8.0, (64, 16))
N = 2.0


def _obj(p=4.0, nodes="coarse"):
    return opt.Objective(SPEC, p, QuadratureSpec.for_band(0.25, N), N, "smooth", nodes)


def _phi(seed=0):
    return opt.random_probe(SPEC, N, np.random.default_rng(seed))


def _st_inner(obj, F, G):
    cell = obj.spec.cell
    return sum(obj.weights[j] * cell * np.vdot(G[j], F[j]) for j in range(len(G)))


def test_adjoint_identity(rng):
    obj = _obj()
    phi = _phi()
    UF = np.stack([v for _, v in obj.states(phi)])
    G = rng.standard_normal(UF.shape) + 1j * rng.standard_normal(UF.shape)
    lhs = _st_inner(obj, UF, G)
    rhs = core.inner(phi, opt.adjoint_apply(G, obj))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_value_matches_functional():
    obj = _obj(5.0, nodes="fine")
    phi = _phi(1)
    val, _ = opt.value_and_gradient(phi, obj)
    assert val == pytest.approx(opt.functional(phi, obj), rel=1e-12)


@pytest.mark.parametrize("p", [4.0, 6.0, 3.5])
def test_gradient_matches_finite_differences(p, rng):
    obj = _obj(p)
    phi = _phi(2)
    _, g = opt.value_and_gradient(phi, obj)
    for _ in range(3):
        h = phi.with_coeffs((rng.standard_normal(SPEC.dims) + 1j * rng.standard_normal(SPEC.dims))
                            * (np.abs(phi.coeffs) > 0))
        eps = 1e-5
        fd = (opt.functional(phi + h * eps, obj) - opt.functional(phi + h * (-eps), obj)) / (2 * eps)
        assert core.inner(g, h).real == pytest.approx(fd, rel=1e-6)


def test_euler_identity():
    obj = _obj(6.0)
    phi = _phi(3)
    val, g = opt.value_and_gradient(phi, obj)
    assert core.inner(g, phi).real == pytest.approx(6.0 * val, rel=1e-10)


@settings(max_examples=8, deadline=None)
@given(st.floats(0.1, 10.0))
def test_gradient_homogeneity(c):
    obj = _obj(5.0)
    phi = _phi(4)
    _, g1 = opt.value_and_gradient(phi, obj)
    _, gc = opt.value_and_gradient(phi * c, obj)
    assert np.allclose(gc.coeffs, c**4 * g1.coeffs, rtol=1e-9, atol=1e-12 * np.abs(gc.coeffs).max())


def test_gradient_guards():
    phi = _phi()
    with pytest.raises(ParameterOutOfRange):
        opt.gradient(phi, 3.0, 0.25, N)
    with pytest.raises(ZeroData):
        opt.gradient(phi * 0.0, 4.0, 0.25, N)
    with pytest.raises(ShapeMismatch):
        opt.adjoint_apply(np.zeros((2,) + SPEC.dims), _obj())
    other = core.WaveguideSpec(1, 1, 8.0, (128, 16))
    with pytest.raises(ShapeMismatch):
        opt.functional(opt.random_probe(other, N, np.random.default_rng(0)), _obj())


def test_ascent_monotone():
    tr = opt.ascent(_phi(5), _obj(6.0), max_iter=15)
    v = np.array(tr.values)
    assert np.all(np.diff(v) >= -1e-12)
    assert v[-1] > v[0]
    assert core.l2_norm(tr.field) == pytest.approx(1.0)


def test_estimate_constant_separable():
    est = opt.estimate_constant(4.0, 1.0, 4.0, random_probes=1)
    assert est.value == max(est.probes.values())
    assert set(est.probes) == {"phi1", "phi2", "phi3", "gauss0"}
    assert est.as_dict()["best"] == est.best


def test_estimate_constant_budget_warning():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        est = opt.estimate_constant(4.0, 1.0, 4.0, random_probes=1, max_probes=2)
    assert est.budget_exceeded and len(est.probes) == 2
    assert any(issubclass(x.category, BudgetExceeded) for x in w)


def test_estimate_constant_ascent_on_grid():
    with pytest.warns(BudgetExceeded):
        est = opt.estimate_constant(6.0, 0.25, N, spec=SPEC, strategy="both", restarts=2, random_probes=1,
                                    max_iter=5)
    assert est.value >= max(est.probes.values()) - 1e-12
    assert len(est.traces) == 2
    with pytest.raises(ValueError):
        opt.estimate_constant(6.0, 0.25, N, strategy="ascent")


def test_fit_exponents():
    s = [(T, Nn, T**0.125 * Nn**0.25) for T in (1, 4, 16, 64) for Nn in (8, 16, 32, 64)]
    f = opt.fit_exponents(s)
    assert f["T"] == pytest.approx(0.125) and f["N"] == pytest.approx(0.25)
    f = opt.fit_exponents([(1.0, Nn, Nn ** (2 / 3)) for Nn in (8, 16, 32, 64)])
    assert f["N"] == pytest.approx(2 / 3) and f["T"] is None
    with pytest.raises(InsufficientSweep):
        opt.fit_exponents([(1.0, 8.0, 1.0), (1.0, 8.0, 2.0)])


def test_compare_verdicts():
    up = opt.theory_upper("C0", 1, 2, 6, 1.0, 8.0)
    assert opt.compare(2 / 3, "N", 1, 2, 6, up)["verdict"] == "BRACKET"
    assert opt.compare(0.3, "N", 1, 2, 6, up)["verdict"] == "UPPER-OK"
    assert opt.compare(1.5, "N", 1, 2, 6, up)["verdict"] == "LOWER-OK"
    assert opt.compare(0.3, "N", 1, 2, 6)["verdict"] == "FAIL"
