"""The twelve acceptance checks, each returning one PASS/FAIL record.

``full`` runs every check at its stated parameters; ``quick`` shrinks the
sweeps that dominate the run time (fewer points, shorter horizons) and is a
smoke test, not an acceptance run.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import core, counting, extremizers, norms, optimizer, weyl
from . import nls as nls_mod
from .constants import SOURCES, continuity_report, theory_constant

__all__ = ["CriterionResult", "Profile", "PROFILES", "CRITERIA", "run_criterion", "acceptance_suite"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  [{self.number:2d}] {self.name}  ({self.seconds:.1f} s)"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "seconds": self.seconds, "detail": self.detail}


@dataclass(frozen=True)
class Profile:
    name: str
    fields_per_geometry: int = 100
    phi1_Ns: tuple = (8, 16, 32, 64)
    phi2_Ts: tuple = (16, 64, 256)
    probe_Ns: tuple = (8, 16, 32)
    probe_Ts: tuple = (4, 16, 64)
    random_probes: int = 2
    layer_fields: int = 10
    level_Ns: tuple = (16, 32)
    envelope_Ns: tuple = (16, 32)
    weyl_N: int = 64
    ascent_iters: int = 20
    nls_steps: int = 1000
    nls_horizon: float = 100.0
    extra: dict = field(default_factory=dict)


PROFILES = {
    "full": Profile("full"),
    "quick": Profile("quick", fields_per_geometry=20, phi1_Ns=(8, 16, 32), probe_Ns=(8, 16, 24),
                     probe_Ts=(4, 8, 16), random_probes=1, layer_fields=3, ascent_iters=5,
                     nls_steps=200, nls_horizon=10.0),
}


def _rel(a, b) -> float:
    d = float(np.linalg.norm(np.ravel(a) - np.ravel(b)))
    s = float(np.linalg.norm(np.ravel(b)))
    return d / s if s else d


# -------------------------------------------------------------------- checks


def check_unitarity(prof: Profile, seed: int) -> tuple:
    """Parseval, transform round trip and unitarity of the free flow."""
    rng = np.random.default_rng(seed)
    geoms = {"RxT2": core.WaveguideSpec(1, 2, 8.0, (64, 16, 16)), "R2xT": core.WaveguideSpec(2, 1, 8.0, (64, 64, 16))}
    worst = {}
    for name, spec in geoms.items():
        w = {"parseval": 0.0, "round_trip": 0.0, "unitarity": 0.0, "group": 0.0}
        for _ in range(prof.fields_per_geometry):
            F = core.random_field(spec, 3.0, rng)
            f = core.inverse_transform(F)
            n2 = core.l2_norm(F)
            w["parseval"] = max(w["parseval"], abs(core.l2_norm(f) - n2) / n2)
            w["round_trip"] = max(w["round_trip"], _rel(core.forward_transform(f).coeffs, F.coeffs))
            t, s = rng.uniform(-2, 2, 2)
            w["unitarity"] = max(w["unitarity"], abs(core.l2_norm(core.propagate(F, t)) - n2) / n2)
            w["group"] = max(w["group"], _rel(core.propagate(core.propagate(F, t), s).coeffs,
                                                core.propagate(F, t + s).coeffs))
        worst[name] = w
    ok = all(v <= 1e-10 for w in worst.values() for v in w.values())
    return ok, {"worst_relative_error": worst, "tol": 1e-10}


def check_extremizer_slopes(prof: Profile, seed: int) -> tuple:
    r1 = extremizers.ratio_sweep("phi1", 6.0, [1.0], prof.phi1_Ns, 1, 2)
    f1 = extremizers.lower_bound_report("phi1", 6.0, r1, "N", 1, 2, min_points=3)
    r2 = extremizers.ratio_sweep("phi2", 4.0, prof.phi2_Ts, [8.0], 1, 2)
    f2 = extremizers.lower_bound_report("phi2", 4.0, r2, "T", 1, 2, min_points=3)
    ok1 = 0.567 <= f1.slope <= 0.817
    ok2 = 0.075 <= f2.slope <= 0.175
    return ok1 and ok2, {
        "phi1": {"ratios": [r["ratio"] for r in r1], "slope": f1.slope, "target": f1.predicted,
                 "window": [0.567, 0.817], "passed": ok1},
        "phi2": {"ratios": [r["ratio"] for r in r2], "slope": f2.slope, "target": f2.predicted,
                 "window": [0.075, 0.175], "passed": ok2},
    }


def check_upper_bound(prof: Profile, seed: int) -> tuple:
    upper = theory_constant("p4", 1, 2, 4)
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows_n = [(1.0, N, optimizer.estimate_constant(4, 1.0, N, 1, 2, random_probes=prof.random_probes,
                                                      seed=seed).value) for N in prof.probe_Ns]
        rows_t = [(T, 8.0, optimizer.estimate_constant(4, T, 8, 1, 2, random_probes=prof.random_probes,
                                                      seed=seed).value) for T in prof.probe_Ts]
    fn = optimizer.fit_exponents(rows_n, min_points=3)
    ft = optimizer.fit_exponents(rows_t, min_points=3)
    ok_n = fn["N"] <= 0.25 + 0.15
    ok_t = ft["T"] <= 0.125 + 0.1
    out["N_sweep"] = {"values": [r[2] for r in rows_n], "slope": fn["N"], "limit": 0.4, "passed": ok_n,
                      "verdict": optimizer.compare(fn["N"], "N", 1, 2, 4, upper)["verdict"]}
    out["T_sweep"] = {"values": [r[2] for r in rows_t], "slope": ft["T"], "limit": 0.225, "passed": ok_t,
                      "verdict": optimizer.compare(ft["T"], "T", 1, 2, 4, upper)["verdict"]}
    return ok_n and ok_t, out


def check_layer_cake(prof: Profile, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    spec = core.WaveguideSpec(1, 2, 8.0, (128, 16, 16))
    N, T = 4.0, 0.25
    worst = {}
    for p in (10.0 / 3.0, 4.0, 6.0):
        worst[p] = 0.0
    for _ in range(prof.layer_fields):
        phi = core.random_field(spec, N, rng)
        phi = phi * (1.0 / core.l2_norm(phi))
        q = norms.default_quadrature(phi, T, N)
        pr = norms.level_set_profile(phi, T, N, quad=q)
        for p in worst:
            direct = norms.lp_spacetime_norm(phi, p, q, N, check_wrap=False).coarse
            worst[p] = max(worst[p], abs(norms.layer_cake_norm(pr, p) / direct - 1.0))
    ok = all(v <= 0.01 for v in worst.values())
    return ok, {"worst_relative_error": {f"{p:.4g}": v for p, v in worst.items()}, "tol": 0.01}


def check_level_decay(prof: Profile, seed: int, c: float = 0.5) -> tuple:
    e = 10.0 / 3.0
    consts = {cc: [] for cc in (0.25, 0.5)}
    consts.setdefault(c, [])
    for N in prof.level_Ns:
        fam = extremizers.build_phi3(N, 1.0, 1, 2)
        pr = norms.level_set_profile(fam.data, 1.0, N)
        for cc in consts:
            consts[cc].append(norms.levelset_decay_fit(pr, e, cc * N).constant)
    spread = {cc: max(v) / min(v) for cc, v in consts.items()}
    ok = spread[c] <= 2.0
    return ok, {"Ns": list(prof.level_Ns), "lambda_min_over_N": c, "constants": consts[c],
                "spread": spread[c], "sensitivity": {str(k): v for k, v in spread.items()}}


def check_kernel_envelopes(prof: Profile, seed: int) -> tuple:
    res = {v: weyl.envelope_stability(v, prof.envelope_Ns) for v in weyl.VARIANTS}
    ok = all(r["passed"] for r in res.values())
    return ok, {v: {"constants": r["constants"], "spread": r["spread"]} for v, r in res.items()}


def check_weyl(prof: Profile, seed: int) -> tuple:
    N = prof.weyl_N
    worst, arg = 0.0, None
    count = 0
    for q in range(1, 9):
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            rep = weyl.weyl_envelope_check(a, q, N, (0.0, 0.5 / (q * N)))
            count += 1
            if rep.max_ratio > worst:
                worst, arg = rep.max_ratio, (a, q)
    return worst <= 8.0, {"N": N, "fractions": count, "worst_ratio": worst, "at": arg, "limit": 8.0}


def check_j_decomposition(prof: Profile, seed: int) -> tuple:
    N, T = 16, 1.0
    As = (1 / 128, 1 / 64, 1 / 32)
    rep = weyl.dispersive_check(N, "RT2")
    rows = [weyl.j_decomposition(N, T, A, "RT2", report=rep) for A in As]
    j1 = [r["J1_hat"] / r["A"] for r in rows]
    j2 = [r["J2"] * r["A"] ** 1.5 for r in rows]
    psi_max = rows[0]["psi_max"]
    ok1 = all(v <= 5 * psi_max for v in j1)
    spread = max(j2) / min(j2)
    ok2 = spread <= 2.0
    direct = [weyl.j_decomposition(N, T, A, "RT2", method="direct")["J2"] * A**1.5 for A in As]
    return ok1 and ok2, {"A": list(As), "J1_hat_over_A": j1, "limit": 5 * psi_max, "J2_A32": j2,
                         "spread": spread, "direct_J2_A32": direct}


def check_counting(prof: Profile, seed: int) -> tuple:
    a = counting.r2_table(10**4, "loop")
    b = counting.r2_table(10**4, "divisor")
    eq = bool(np.array_equal(a, b))
    recs = counting.measure_sweep()
    worst = max(recs, key=lambda r: r.ratio)
    ok = eq and worst.ratio <= 10.0
    return ok, {"r2_equal_up_to": 10**4, "r2_equal": eq, "cells": len(recs), "worst_ratio": worst.ratio,
                "worst_at": {"C": worst.C, "T": worst.T, "N": worst.N}, "limit": 10.0}


def check_optimizer(prof: Profile, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    spec = core.WaveguideSpec(1, 2, 16.0, (512, 32, 32))
    N, T = 8.0, 1.0 / 16.0
    phi = optimizer.random_probe(spec, N, rng)
    q = norms.default_quadrature(phi, T, N, mode="smooth")
    fd = {}
    for p in (3.5, 4.0, 6.0):
        obj = optimizer.Objective(spec, p, q, N)
        g = optimizer.gradient(phi, p, T, N, quad=q)
        errs = []
        for _ in range(8):
            v = optimizer.random_probe(spec, N, rng)
            h = 1e-4
            num = (optimizer.functional(phi + v * h, obj) - optimizer.functional(phi + v * (-h), obj)) / (2 * h)
            ana = core.inner(g, v).real
            errs.append(abs(num - ana) / abs(ana))
        fd[str(p)] = max(errs)
    ok_fd = all(e < 1e-5 for e in fd.values())
    aspec = core.WaveguideSpec(1, 1, 128.0, (2048, 16))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = optimizer.estimate_constant(6, 1.0, 4, spec=aspec, strategy="both", restarts=4,
                                          random_probes=1, seed=seed, max_iter=prof.ascent_iters)
    mono = all(np.all(np.diff(t.values) >= 0) for t in est.traces)
    fam_best = max(est.probes[k] for k in extremizers.KINDS)
    ok_sup = est.value >= fam_best and est.value >= max(est.probes.values())
    return ok_fd and mono and ok_sup, {
        "fd_relative_error": fd, "fd_tol": 1e-5, "ascent_monotone": mono,
        "traces": {t.start: [t.values[0], t.values[-1], len(t.values) - 1] for t in est.traces},
        "estimate": est.value, "best": est.best, "best_family_probe": fam_best,
        "budget_exceeded": est.budget_exceeded,
    }


def check_nls(prof: Profile, seed: int) -> tuple:
    Nc = 16
    spec = nls_mod.nls_spec(Nc / 1.5, L=2.0)
    dt = 1.0 / (4 * Nc * Nc)
    rng = np.random.default_rng(seed)
    out = {}
    u0 = nls_mod.initial_data(spec, 4.0, 1.0, rng)
    st = nls_mod.evolve(nls_mod.new_state(u0, 4.0, dt, Nc), prof.nls_steps)
    out["mass_drift"] = st.mass_drift
    back = nls_mod.evolve(st, prof.nls_steps, dt=-dt)
    out["reversibility"] = _rel(back.field.coeffs, u0.coeffs)
    smooth = nls_mod.initial_data(spec, 2.0, 1.0, np.random.default_rng(seed + 1))
    drifts = []
    for k in (1, 2):
        h = dt / k
        drifts.append(nls_mod.evolve(nls_mod.new_state(smooth, 4.0, h, Nc), int(round(1.0 / h))).energy_drift)
    out["energy_drift"] = drifts
    out["halving_ratio"] = drifts[0] / drifts[1]
    rec, _ = nls_mod.run_trajectory(u0, 4.0, 2.0, prof.nls_horizon, dt, Nc)
    out["growth"] = rec.as_dict()
    ok = (out["mass_drift"] <= 1e-10 and 3.2 <= out["halving_ratio"] <= 4.8
          and out["reversibility"] <= 1e-8 and rec.passed)
    return ok, out


def check_continuity(prof: Profile, seed: int) -> tuple:
    cases = [("C0", 1, 2, Fraction(4)), ("C0", 2, 1, Fraction(4)), ("C1", 2, 1, Fraction(7, 2)),
             ("C2", 1, 2, Fraction(7, 2)), ("C2", 1, 2, Fraction(18, 5)), ("C3", 1, 2, Fraction(5)),
             ("C3", 1, 2, Fraction(9, 2))]
    rows = []
    ok = True
    for src, m, n, p in cases:
        for tau, left, right, eq in continuity_report(src, m, n, p):
            rows.append({"source": src, "m": m, "n": n, "p": str(p), "threshold": str(tau), "equal": eq})
            ok &= eq
    return ok, {"checks": rows, "sources": [s for s in SOURCES if s.startswith("C")]}


CRITERIA = {
    1: ("unitarity, Parseval and round trip", check_unitarity),
    2: ("extremizer lower-bound slopes", check_extremizer_slopes),
    3: ("L^4 upper-bound slopes of probe sup", check_upper_bound),
    4: ("layer-cake identity", check_layer_cake),
    5: ("level-set decay stability", check_level_decay),
    6: ("kernel envelope stability", check_kernel_envelopes),
    7: ("Weyl sum envelope", check_weyl),
    8: ("J-decomposition sizes", check_j_decomposition),
    9: ("lattice counts and shell measures", check_counting),
    10: ("optimizer gradient, ascent and sup", check_optimizer),
    11: ("NLS conservation, order, reversibility, growth", check_nls),
    12: ("theory-constant continuity", check_continuity),
}


def run_criterion(number: int, profile: str = "full", seed: int = 0) -> CriterionResult:
    name, fn = CRITERIA[number]
    prof = PROFILES[profile]
    t0 = time.perf_counter()
    ok, detail = fn(prof, seed)
    return CriterionResult(number, name, bool(ok), detail, time.perf_counter() - t0)


def acceptance_suite(profile: str = "quick", seed: int = 0, only=None, echo=print) -> list:
    """Run the selected checks, echoing one verdict line per check."""
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {sorted(PROFILES)}")
    out = []
    for k in sorted(CRITERIA if only is None else only):
        r = run_criterion(k, profile, seed)
        if echo is not None:
            echo(r.line())
        out.append(r)
    return out
