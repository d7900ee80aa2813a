"""Measurement-side estimates of the Strichartz constant.

The objective is the discretized ``Phi(phi) = sum_j w_j sum_x cell |U phi|^p``
with ``U phi = exp(i t_j Delta) P_{<=N} phi`` sampled at the quadrature nodes
``t_j``.  Its gradient (for the real inner product ``Re <., .>``) is
``p U^*(|U phi|^(p-2) U phi)``, and ``U^*`` is applied exactly, so gradients
are exact for the discrete functional.

``estimate_constant`` takes the supremum of ``Phi^(1/p) / ||phi||_2`` over
the extremizer families, random probes and, on a grid, projected gradient
ascent on the unit sphere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import TheoryConstant, as_fraction, lower_exponents, theory_constant
from .core import (
    SpectralField,
    WaveguideSpec,
    build_grid,
    fft_forward,
    fft_inverse,
    inner,
    l2_norm,
    projector_symbol,
)
from .cutoffs import chi
from .errors import BudgetExceeded, InsufficientSweep, ParameterOutOfRange, ShapeMismatch, ZeroData
from .extremizers import build_family
from .fitting import fit_power, fit_power2
from .norms import default_quadrature, strichartz_ratio
from .quadrature import QuadratureSpec
from .separable import ProductField, RealLineFactor, TorusFactor

__all__ = [
    "Objective",
    "adjoint_apply",
    "gradient",
    "functional",
    "random_probe",
    "random_product_probe",
    "ascent",
    "AscentTrace",
    "ConstantEstimate",
    "estimate_constant",
    "fit_exponents",
    "compare",
]


# ------------------------------------------------------------------ objective


@dataclass(frozen=True, eq=False)
class Objective:
    """Quadrature nodes, weights and projector symbol for one ``(spec, p, T, N)``.

    ``nodes="coarse"`` uses the trapezoid rule at ``quad.dt``; ``"fine"`` the
    refined rule at ``quad.dt / quad.refine``.
    """

    spec: WaveguideSpec
    p: float
    quad: QuadratureSpec
    N: float | None
    mode: str = "smooth"
    nodes: str = "coarse"

    @property
    def times(self) -> np.ndarray:
        t = self.quad.fine_times()
        return t if self.nodes == "fine" else t[:: self.quad.refine]

    @property
    def weights(self) -> np.ndarray:
        if self.nodes == "fine":
            return self.quad.fine_weights()
        return self.quad.coarse_weights()[:: self.quad.refine]

    @property
    def symbol(self) -> np.ndarray:
        if self.N is None or self.mode == "none":
            return np.ones(self.spec.dims)
        grid = build_grid(self.spec, cutoffs=(self.N,))
        return projector_symbol(grid, self.N, self.mode)

    def states(self, phi: SpectralField):
        """Yield ``(j, U phi at t_j)`` as physical arrays."""
        grid = build_grid(self.spec)
        c0 = phi.coeffs * self.symbol
        for j, t in enumerate(self.times):
            yield j, fft_inverse(c0 * np.exp(-2j * np.pi * t * grid.xi2), self.spec)


def _check(phi: SpectralField, obj: Objective):
    if phi.spec != obj.spec:
        raise ShapeMismatch("field and objective live on different grids")


def functional(phi: SpectralField, obj: Objective) -> float:
    """``Phi(phi) = sum_j w_j sum_x cell |U phi|^p``."""
    _check(phi, obj)
    w = obj.weights
    cell = obj.spec.cell
    total = 0.0
    for j, v in obj.states(phi):
        a2 = v.real * v.real + v.imag * v.imag
        total += w[j] * cell * float(np.sum(a2 ** (0.5 * obj.p)))
    return total


def adjoint_apply(density: np.ndarray, obj: Objective) -> SpectralField:
    """``U^* G = sum_j w_j P exp(-i t_j Delta) G_j``.

    ``density`` has shape ``(len(obj.times),) + spec.dims``.  The adjoint is
    taken with respect to ``<F, G> = sum_j w_j sum_x cell F_j conj(G_j)`` on
    space-time samples and the spectral ``L^2`` product on data.
    """
    density = np.asarray(density)
    expect = (obj.times.size,) + tuple(obj.spec.dims)
    if density.shape != expect:
        raise ShapeMismatch(f"density has shape {density.shape}, expected {expect}")
    grid = build_grid(obj.spec)
    acc = np.zeros(obj.spec.dims, dtype=complex)
    for j, t in enumerate(obj.times):
        acc += obj.weights[j] * np.exp(2j * np.pi * t * grid.xi2) * fft_forward(density[j], obj.spec)
    return SpectralField(obj.spec, acc * obj.symbol, "adjoint")


def value_and_gradient(phi: SpectralField, obj: Objective):
    """``(Phi(phi), p U^*(|U phi|^(p-2) U phi))`` in one sweep."""
    _check(phi, obj)
    grid = build_grid(obj.spec)
    w = obj.weights
    p = obj.p
    cell = obj.spec.cell
    acc = np.zeros(obj.spec.dims, dtype=complex)
    total = 0.0
    c0 = phi.coeffs * obj.symbol
    for j, t in enumerate(obj.times):
        ph = np.exp(-2j * np.pi * t * grid.xi2)
        v = fft_inverse(c0 * ph, obj.spec)
        a2 = v.real * v.real + v.imag * v.imag
        ap = a2 ** (0.5 * (p - 2.0))
        total += w[j] * cell * float(np.sum(ap * a2))
        acc += w[j] * np.conj(ph) * fft_forward(ap * v, obj.spec)
    return total, SpectralField(obj.spec, p * acc * obj.symbol, "gradient")


def gradient(phi: SpectralField, p: float, T: float, N: float, quad: QuadratureSpec | None = None,
             mode: str = "smooth", nodes: str = "coarse") -> SpectralField:
    """Gradient of ``Phi`` at ``phi``.

    Raises
    ------
    ZeroData
        If ``phi`` vanishes.
    ParameterOutOfRange
        Unless ``p > 10/3``, where ``|F|^(p-2)`` is smooth enough at zeros.
    """
    if not p > 10.0 / 3.0:
        raise ParameterOutOfRange("gradient needs p > 10/3")
    if l2_norm(phi) == 0:
        raise ZeroData("gradient of the ratio needs nonzero data")
    q = default_quadrature(phi, T, N, mode=mode) if quad is None else quad
    return value_and_gradient(phi, Objective(phi.spec, float(p), q, N, mode, nodes))[1]


# -------------------------------------------------------------------- probes


def random_probe(spec: WaveguideSpec, N: float, rng: np.random.Generator, width: float | None = None,
                 tag: str = "gauss") -> SpectralField:
    """Gaussian data on ``|xi| <= N``, localized to ``|x_i| <~ width`` in the Euclidean directions."""
    grid = build_grid(spec)
    c = (rng.standard_normal(spec.dims) + 1j * rng.standard_normal(spec.dims)) * chi(2.0 * np.sqrt(grid.xi2) / N)
    v = fft_inverse(c, spec)
    w = spec.L / 8.0 if width is None else float(width)
    for i in range(spec.m):
        v = v * grid.axis_view(chi(grid.coords[i] / w), i)
    c = fft_forward(v, spec) * (grid.xi2 <= N * N)
    return SpectralField(spec, c, tag)


def random_product_probe(m: int, n: int, N: float, rng: np.random.Generator, packets: int = 6,
                         spread: float = 2.0, tag: str = "gauss-product") -> ProductField:
    """Tensor product of random line wave packets and random torus coefficients on ``|k| <= N``."""
    f = []
    for _ in range(m):
        centers = rng.uniform(-spread, spread, packets)
        amps = rng.standard_normal(packets) + 1j * rng.standard_normal(packets)
        f.append(RealLineFactor.packets(N / 2.0, centers, amps, label="R"))
    kmax = int(math.floor(N))
    for _ in range(n):
        ks = np.arange(-kmax, kmax + 1)
        f.append(TorusFactor(ks, rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size), "T"))
    return ProductField(tuple(f), tag)


# -------------------------------------------------------------------- ascent


@dataclass(frozen=True)
class AscentTrace:
    start: str
    values: tuple            # ratio after each accepted iterate (first entry: start)
    steps: tuple
    converged: bool
    field: SpectralField = field(repr=False, default=None)


def ascent(phi0: SpectralField, obj: Objective, max_iter: int = 200, armijo: float = 1e-4,
           shrink: float = 0.5, step0: float = 1.0, min_step: float = 1e-8, tol: float = 1e-8,
           start: str = "") -> AscentTrace:
    """Normalized gradient ascent of ``Phi`` on the unit ``L^2`` sphere.

    Each step moves along the tangent gradient, renormalizes, and backtracks
    from ``step0`` by ``shrink`` until the Armijo condition holds, so the
    recorded values are nondecreasing.  Stops when no step is accepted or
    the relative gain falls below ``tol``.
    """
    nrm = l2_norm(phi0)
    if nrm == 0:
        raise ZeroData("ascent needs nonzero data")
    phi = phi0 * (1.0 / nrm)
    val, g = value_and_gradient(phi, obj)
    p = obj.p
    values, steps = [val ** (1.0 / p)], []
    converged = False
    for _ in range(max_iter):
        gt = g - phi * inner(g, phi).real
        gn = l2_norm(gt)
        if gn == 0:
            converged = True
            break
        d = gt * (1.0 / gn)
        s = step0
        accepted = False
        while s >= min_step:
            cand = phi + d * s
            cand = cand * (1.0 / l2_norm(cand))
            cv = functional(cand, obj)
            if cv >= val + armijo * s * gn:
                accepted = True
                break
            s *= shrink
        if not accepted:
            converged = True
            break
        gain = (cv - val) / val
        phi = cand
        val, g = value_and_gradient(phi, obj)
        values.append(val ** (1.0 / p))
        steps.append(s)
        if gain < tol:
            converged = True
            break
    return AscentTrace(start, tuple(values), tuple(steps), converged, phi)


# ----------------------------------------------------------------- estimates


@dataclass(frozen=True)
class ConstantEstimate:
    p: float
    T: float
    N: float
    value: float
    best: str
    probes: dict
    traces: tuple
    budget_exceeded: bool = False

    def as_dict(self) -> dict:
        return {
            "p": self.p, "T": self.T, "N": self.N, "value": self.value, "best": self.best,
            "probes": dict(self.probes),
            "ascent": [{"start": t.start, "values": list(t.values), "converged": t.converged} for t in self.traces],
            "budget_exceeded": self.budget_exceeded,
        }


def estimate_constant(p: float, T: float, N: float, m: int = 1, n: int = 2,
                      spec: WaveguideSpec | None = None, strategy: str = "probes",
                      restarts: int = 4, random_probes: int = 2, seed: int = 0,
                      max_iter: int = 200, max_probes: int = 64, mode: str | None = None) -> ConstantEstimate:
    """Supremum of measured ratios at ``(p, T, N)``.

    Without ``spec`` the probes are separable (extremizer families and random
    tensor products) and ascent is unavailable.  With ``spec`` every probe is
    sampled on the grid and ``strategy`` may include ``"ascent"``, started
    from the families and random data (``restarts`` runs in total).

    A ``BudgetExceeded`` warning is issued, and ``budget_exceeded`` set, when
    a probe or iteration budget cut the search short; the best value found so
    far is still returned.
    """
    if strategy not in ("probes", "ascent", "both"):
        raise ValueError("strategy must be 'probes', 'ascent' or 'both'")
    if strategy != "probes" and spec is None:
        raise ValueError("ascent needs a grid: pass spec")
    rng = np.random.default_rng(seed)
    if spec is not None:
        m, n = spec.m, spec.n
    starts = []
    for kind in ("phi1", "phi2", "phi3"):
        fam = build_family(kind, N, max(T, 1.0), m, n)
        starts.append((kind, fam.data if spec is None else fam.data.to_spectral(spec, tag=kind)))
    for r in range(random_probes):
        if spec is None:
            starts.append((f"gauss{r}", random_product_probe(m, n, N, rng)))
        else:
            starts.append((f"gauss{r}", random_probe(spec, N, rng)))
    exceeded = len(starts) > max_probes
    starts = starts[:max_probes]
    probes = {}
    if spec is None:
        for name, phi in starts:
            probes[name] = strichartz_ratio(phi, p, T, N)
        quad = None
    else:
        md = "smooth" if mode is None else mode
        quad = default_quadrature(starts[0][1], T, N, mode=md)
        obj = Objective(spec, float(p), quad, N, md)
        for name, phi in starts:
            probes[name] = functional(phi, obj) ** (1.0 / p) / l2_norm(phi)
    traces = []
    if strategy in ("ascent", "both"):
        for name, phi in starts[: max(0, restarts)]:
            tr = ascent(phi, obj, max_iter=max_iter, start=name)
            traces.append(tr)
            exceeded |= not tr.converged
    if strategy == "ascent":
        cands = {f"ascent:{t.start}": t.values[-1] for t in traces}
        cands.update(probes)  # starting points are probes too
    else:
        cands = dict(probes)
        cands.update({f"ascent:{t.start}": t.values[-1] for t in traces})
    best = max(cands, key=cands.get)
    if exceeded:
        warnings.warn("search budget exhausted; returning the best value found", BudgetExceeded, stacklevel=2)
    return ConstantEstimate(float(p), float(T), float(N), float(cands[best]), best, probes, tuple(traces), exceeded)


# ---------------------------------------------------------------- fitting


def fit_exponents(samples: Sequence, min_points: int = 4) -> dict:
    """Log-log slopes of ``value`` against ``T`` and/or ``N``.

    ``samples`` are ``(T, N, value)`` triples.  Axes with a single distinct
    value are held fixed; when both vary a bivariate fit is made.

    Raises
    ------
    InsufficientSweep
        If no axis varies or a varying axis has fewer than ``min_points`` values.
    DegenerateDesign
        If ``T`` and ``N`` are collinear in log scale.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("samples must be (T, N, value) triples")
    T, N, y = arr.T
    varies = {ax: np.unique(np.round(np.log(v), 12)).size > 1 for ax, v in (("T", T), ("N", N))}
    if varies["T"] and varies["N"]:
        f = fit_power2(T, N, y, min_points=min_points)
        return {"T": f.slopes[0], "N": f.slopes[1], "intercept": f.intercept, "r2": f.r2, "points": f.points}
    for ax, x in (("T", T), ("N", N)):
        if varies[ax]:
            f = fit_power(x, y, min_points=min_points, axis=ax)
            other = "N" if ax == "T" else "T"
            return {ax: f.slopes[0], other: None, "intercept": f.intercept, "r2": f.r2, "points": f.points}
    raise InsufficientSweep("neither T nor N varies")


def compare(measured_slope: float, axis: str, m: int, n: int, p, upper: TheoryConstant | None = None,
            slack: float = 0.1) -> dict:
    """Verdict for a measured log-slope against the theory's lower and upper slopes.

    The lower slope along ``axis`` is the largest exponent among the three
    extremizer monomials; the upper slope is the largest exponent among the
    terms of ``upper``.  ``LOWER-OK`` needs ``measured >= lower - slack``,
    ``UPPER-OK`` needs ``measured <= upper + slack``; both give ``BRACKET``.
    """
    if axis not in ("T", "N"):
        raise ValueError("axis must be 'T' or 'N'")
    pf = as_fraction(p)
    k = 0 if axis == "T" else 1
    lows = lower_exponents(m, n, pf)
    lower = max(float((mono.t_exp, mono.n_exp)[k]) for mono in lows.values())
    lower_ok = measured_slope >= lower - slack
    up = None
    upper_ok = None
    if upper is not None:
        up = max(float((mono.t_exp, mono.n_exp)[k]) for mono in upper.terms)
        upper_ok = measured_slope <= up + slack
    if lower_ok and upper_ok:
        verdict = "BRACKET"
    elif lower_ok:
        verdict = "LOWER-OK"
    elif upper_ok:
        verdict = "UPPER-OK"
    else:
        verdict = "FAIL"
    return {"axis": axis, "measured": measured_slope, "lower": lower, "upper": up,
            "lower_ok": lower_ok, "upper_ok": upper_ok, "verdict": verdict}


def theory_upper(source: str, m: int, n: int, p, T: float, N: float) -> TheoryConstant:
    return theory_constant(source, m, n, p, T, N)
