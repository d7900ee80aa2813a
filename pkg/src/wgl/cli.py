"""Command-line driver: ``wgl <command> [options]``.

Each command writes a manifest, a CSV table and a JSON summary into
``--out`` (default: the current directory) and prints one verdict line per
check.  Exit status: 0 on success, 1 on any FAIL verdict, 2 when the
requested parameters lie outside a bound's stated range.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from . import __version__
from .errors import RegimeError, SchemaError, WglError
from .manifest import ExperimentManifest, write_csv, write_json

__all__ = ["main", "build_parser"]


def _floats(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok:
            out.append(float(Fraction(tok)))
    if not out:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")
    return out


def _ints(text: str) -> list:
    return [int(v) for v in _floats(text)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=1, help="Euclidean directions")
    common.add_argument("--n", type=int, default=2, help="torus directions")
    common.add_argument("--p", type=_floats, default=[4.0], help="exponents, comma list (fractions allowed)")
    common.add_argument("--T", type=_floats, default=[1.0], help="time horizons, comma list")
    common.add_argument("--N", type=_floats, default=[8.0], help="frequency cutoffs, comma list")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--profile", choices=("quick", "full"), default="quick")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--tol-slope", type=float, default=0.1, help="log-slope slack")
    common.add_argument("--dt", type=float, default=None, help="time step (nls)")
    common.add_argument("--manifest", type=Path, default=None, help="load parameters from a JSON manifest")

    ap = argparse.ArgumentParser(prog="wgl", description="Long-time Strichartz numerics on R^m x T^n.")
    ap.add_argument("--version", action="version", version=f"wgl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", parents=[common], help="theory bounds and measured probe sup")
    c.add_argument("--source", default="auto", help="C0, C1, C2, C3, p4, conjecture, corollary-window or auto")
    c.add_argument("--no-measure", action="store_true", help="theory values only")

    e = sub.add_parser("extremizers", parents=[common], help="ratios of the extremizer families")
    e.add_argument("--family", choices=("phi1", "phi2", "phi3"), default="phi1")

    k = sub.add_parser("kernel", parents=[common], help="per-regime kernel envelope constants")
    k.add_argument("--variant", choices=("RT2", "R2T"), default="RT2")

    w = sub.add_parser("weyl", parents=[common], help="Weyl sums against their envelope near a/q")
    w.add_argument("--qmax", type=int, default=8)

    n = sub.add_parser("counting", parents=[common], help="lattice counts and shell measures")
    n.add_argument("--selftest", action="store_true", help="cross-check the counting oracles")

    lv = sub.add_parser("levelset", parents=[common], help="level-set profile and decay constant")
    lv.add_argument("--family", choices=("phi1", "phi2", "phi3"), default="phi3")
    lv.add_argument("--exponent", type=float, default=10.0 / 3.0)
    lv.add_argument("--lambda-min", type=float, default=0.5, help="threshold as a multiple of N")

    o = sub.add_parser("optimize", parents=[common], help="estimate the Strichartz constant")
    o.add_argument("--strategy", choices=("probes", "ascent", "both"), default="probes")
    o.add_argument("--restarts", type=int, default=4)
    o.add_argument("--random-probes", type=int, default=1)
    o.add_argument("--max-iter", type=int, default=200)
    o.add_argument("--L", type=float, default=None, help="box length for grid runs")

    s = sub.add_parser("snorm", parents=[common], help="long-time Strichartz S-norms of localized data")
    s.add_argument("--q", type=float, default=4.0)
    s.add_argument("--qt", type=float, default=5.0)
    s.add_argument("--J", type=float, default=None, help="interval length (default N^(1/10))")

    ns = sub.add_parser("nls", parents=[common], help="NLS trajectory and Sobolev growth")
    ns.add_argument("--mu", type=float, default=4.0)
    ns.add_argument("--s", type=float, default=2.0)
    ns.add_argument("--horizon", type=float, default=10.0)
    ns.add_argument("--band", type=float, default=4.0, help="initial data band")
    ns.add_argument("--amplitude", type=float, default=1.0)

    a = sub.add_parser("accept", parents=[common], help="run the acceptance checks")
    a.add_argument("--only", type=_ints, default=None, help="criterion numbers, comma list")
    return ap


# ------------------------------------------------------------------ helpers


def _emit(ok: bool, text: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'}  {text}")
    return ok


def _params(args) -> dict:
    skip = {"command", "out", "manifest", "seed", "tol_slope"}
    out = {}
    for k, v in vars(args).items():
        if k in skip:
            continue
        if isinstance(v, Path):
            v = str(v)
        out[k] = v
    return out


def _manifest(args) -> ExperimentManifest:
    outs = {"csv": f"{args.command}.csv", "json": f"{args.command}.json"}
    return ExperimentManifest(args.command, _params(args), int(args.seed), outs,
                              {"slope": float(args.tol_slope)}, __version__)


def _apply_manifest(args) -> None:
    man = ExperimentManifest.from_json(Path(args.manifest).read_text(encoding="utf-8"))
    if man.command != args.command:
        raise SchemaError(f"manifest is for {man.command!r}, not {args.command!r}")
    for key, val in man.params.items():
        if not hasattr(args, key):
            raise SchemaError(f"unknown parameter {key!r} for {args.command}")
        setattr(args, key, val)
    args.seed = man.seed
    if "slope" in man.tolerances:
        args.tol_slope = man.tolerances["slope"]


def _write(args, rows, columns, summary) -> None:
    out = Path(args.out)
    man = _manifest(args)
    write_json(out / f"{args.command}.manifest.json", man.to_dict())
    if columns:
        write_csv(out / man.outputs["csv"], rows, columns)
    write_json(out / man.outputs["json"], summary)


# ----------------------------------------------------------------- commands


def _auto_source(m, n, p) -> str:
    pf = Fraction(p).limit_denominator(10**6)
    if (m, n) == (1, 2) and pf == 4:
        return "p4"
    if (m, n) == (1, 2) and Fraction(10, 3) < pf < 4:
        return "C2"
    if (m, n) == (1, 2) and 4 < pf < 6:
        return "C3"
    if (m, n) == (2, 1) and Fraction(10, 3) < pf < 4:
        return "C1"
    return "C0"


def cmd_constants(args) -> int:
    from .constants import theory_constant
    from .optimizer import compare, estimate_constant, fit_exponents

    cols = ("m", "n", "p", "T", "N", "source", "regime", "t_exp", "n_exp", "theory", "measured", "best")
    rows, verdicts = [], []
    ok = True
    for p in args.p:
        src = _auto_source(args.m, args.n, p) if args.source == "auto" else args.source
        cells = [(T, N) for T in args.T for N in args.N]
        theo = {c: theory_constant(src, args.m, args.n, p, c[0], c[1]) for c in cells}
        samples = []
        for (T, N), tc in theo.items():
            meas, best = None, None
            if not args.no_measure:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    est = estimate_constant(p, T, N, args.m, args.n, seed=args.seed)
                meas, best = est.value, est.best
                samples.append((T, N, meas))
            ex = tc.exponents or (None, None)
            rows.append({"m": args.m, "n": args.n, "p": p, "T": T, "N": N, "source": src, "regime": tc.regime,
                         "t_exp": None if ex[0] is None else str(ex[0]),
                         "n_exp": None if ex[1] is None else str(ex[1]),
                         "theory": tc.value, "measured": meas, "best": best})
        for axis, vals in (("N", args.N), ("T", args.T)):
            if args.no_measure or len(set(vals)) < 3 or src == "corollary-window":
                continue
            fixed = 0 if axis == "N" else 1      # hold the other axis at its first value
            sub = [s for s in samples if s[fixed] == samples[0][fixed]]
            fit = fit_exponents(sub, min_points=3)
            upper = theory_constant(src, args.m, args.n, p, max(args.T), max(args.N))
            v = compare(fit[axis], axis, args.m, args.n, p, upper, slack=args.tol_slope)
            v.update({"p": p, "source": src, "r2": fit["r2"]})
            verdicts.append(v)
            good = v["verdict"] in ("BRACKET", "UPPER-OK")
            ok &= _emit(good, f"p={p:g} {axis}-slope {fit[axis]:.4f} vs upper {v['upper']} "
                              f"lower {v['lower']:.4f}: {v['verdict']}")
    _write(args, rows, cols, {"rows": rows, "verdicts": verdicts})
    return 0 if ok else 1


def cmd_extremizers(args) -> int:
    from .extremizers import FAMILY_COLUMNS, lower_bound_report, ratio_sweep

    rows, reports = [], []
    ok = True
    for p in args.p:
        r = ratio_sweep(args.family, p, args.T, args.N, args.m, args.n)
        rows += r
        for axis, vals in (("N", args.N), ("T", args.T)):
            if len(set(vals)) >= 3:
                sub = [x for x in r if x["T" if axis == "N" else "N"] == r[0]["T" if axis == "N" else "N"]]
                rep = lower_bound_report(args.family, p, sub, axis, args.m, args.n, tol=args.tol_slope, min_points=3)
                reports.append(rep.as_dict())
                ok &= _emit(rep.passed, f"{args.family} p={p:g} {axis}-slope {rep.slope:.4f} "
                                        f"(lower bound {rep.predicted:.4f})")
    _write(args, rows, FAMILY_COLUMNS, {"rows": rows, "reports": reports})
    return 0 if ok else 1


def cmd_kernel(args) -> int:
    from .weyl import KERNEL_COLUMNS, dispersive_check

    rows, summary = [], []
    for N in args.N:
        rep = dispersive_check(N, args.variant)
        rows += rep.query.rows()
        summary.append({"N": N, "variant": args.variant, "constants": rep.constants, "counts": rep.counts})
        print(f"N={N:g} {args.variant} constants " + ", ".join(f"{k}: {v:.4g}" for k, v in rep.constants.items()))
    ok = True
    if len(summary) >= 2:
        for r in (1, 2, 3):
            cs = [s["constants"][r] for s in summary]
            ok &= _emit(max(cs) / min(cs) <= 2.0, f"regime {r} constants within factor 2: {cs}")
    _write(args, rows, KERNEL_COLUMNS, summary)
    return 0 if ok else 1


def cmd_weyl(args) -> int:
    import math

    from .errors import ParameterOutOfRange
    from .weyl import weyl_envelope_check

    cols = ("N", "a", "q", "offset", "sup", "envelope", "ratio")
    rows = []
    ok = True
    for N in args.N:
        worst = 0.0
        for q in range(1, args.qmax + 1):
            for a in range(1, q + 1):
                if math.gcd(a, q) != 1:
                    continue
                try:
                    rep = weyl_envelope_check(a, q, N, (0.0, 0.5 / (q * N)))
                except ParameterOutOfRange:
                    continue
                for off, s, e, r in zip(rep.offsets, rep.sups, rep.envelopes, rep.ratios):
                    rows.append({"N": N, "a": a, "q": q, "offset": off, "sup": s, "envelope": e, "ratio": r})
                worst = max(worst, rep.max_ratio)
        ok &= _emit(worst <= 8.0, f"N={N:g} worst sup/envelope {worst:.4f} (limit 8)")
    _write(args, rows, cols, {"rows": len(rows), "passed": ok})
    return 0 if ok else 1


def cmd_counting(args) -> int:
    from . import counting

    cols = ("C", "T", "N", "value", "bound", "ratio")
    summary = {}
    ok = True
    if args.selftest:
        a = counting.r2_table(10**4, "loop")
        b = counting.r2_table(10**4, "divisor")
        eq = bool(np.array_equal(a, b))
        ok &= _emit(eq, "r2 loop and divisor oracles agree for A <= 10^4")
        recs = counting.measure_sweep()
    else:
        Ns = [int(N) for N in args.N]
        recs = counting.measure_sweep(args.T, Ns)
        summary["max_counts"] = [counting.max_circle_count(N) for N in Ns]
    worst = max(r.ratio for r in recs)
    ok &= _emit(worst <= 10.0, f"measure_sum ratio {worst:.4f} over {len(recs)} cells (limit 10)")
    summary["worst_ratio"] = worst
    rows = [r.__dict__ for r in recs]
    _write(args, rows, cols, summary)
    return 0 if ok else 1


def cmd_levelset(args) -> int:
    from .extremizers import build_family
    from .norms import level_set_profile, levelset_decay_fit

    cols = ("N", "T", "lambda", "measure")
    rows, fits = [], []
    for T in args.T:
        for N in args.N:
            fam = build_family(args.family, N, T, args.m, args.n)
            pr = level_set_profile(fam.data, T, N)
            rows += [{"N": N, "T": T, "lambda": float(l), "measure": float(v)} for l, v in zip(pr.lambdas, pr.measures)]
            fit = levelset_decay_fit(pr, args.exponent, args.lambda_min * N)
            fits.append({"N": N, "T": T, "constant": fit.constant, "argmax": fit.argmax, "points": fit.points})
            print(f"N={N:g} T={T:g} sup |E| lambda^{args.exponent:.4g} = {fit.constant:.6g}")
    ok = True
    cs = [f["constant"] for f in fits]
    if len(cs) >= 2:
        ok = _emit(max(cs) / min(cs) <= 2.0, f"decay constants within factor 2: {max(cs) / min(cs):.4f}")
    _write(args, rows, cols, {"fits": fits})
    return 0 if ok else 1


def cmd_optimize(args) -> int:
    from .core import WaveguideSpec
    from .optimizer import estimate_constant

    cols = ("p", "T", "N", "value", "best", "budget_exceeded")
    rows, details = [], []
    for p in args.p:
        for T in args.T:
            for N in args.N:
                spec = None
                if args.strategy != "probes":
                    L = args.L if args.L is not None else 32.0 * max(T, 1.0)
                    spec = WaveguideSpec.for_cutoff(args.m, args.n, N, L)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    est = estimate_constant(p, T, N, args.m, args.n, spec=spec, strategy=args.strategy,
                                            restarts=args.restarts, random_probes=args.random_probes,
                                            seed=args.seed, max_iter=args.max_iter)
                d = est.as_dict()
                rows.append({k: d[k] for k in cols})
                details.append(d)
                mono = all(np.all(np.diff(t["values"]) >= 0) for t in d["ascent"])
                _emit(mono and est.value >= max(est.probes.values()),
                      f"p={p:g} T={T:g} N={N:g} estimate {est.value:.6g} (best {est.best})")
    _write(args, rows, cols, {"estimates": details})
    return 0


def cmd_snorm(args) -> int:
    from .norms import s_norm
    from .separable import ProductField, RealLineFactor, TorusFactor

    cols = ("N", "q", "qt", "J", "s_norm", "l2", "ratio")
    rng = np.random.default_rng(args.seed)
    rows = []
    for N in args.N:
        ks = np.arange(-int(N), int(N) + 1)
        facs = [RealLineFactor.box(N / 2.0, N, "R") for _ in range(args.m)]
        for _ in range(args.n):
            c = (rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size)) * (np.abs(ks) >= N / 2)
            facs.append(TorusFactor(ks, c, "T"))
        phi = ProductField(tuple(facs), "shell")
        J = args.J if args.J is not None else N ** 0.1
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val = s_norm(phi, N, args.q, args.qt, (0.0, J))
        l2 = phi.l2_norm()
        rows.append({"N": N, "q": args.q, "qt": args.qt, "J": J, "s_norm": val, "l2": l2, "ratio": val / (N * l2)})
        print(f"N={N:g} S-norm {val:.6g}, S / (N ||f||_2) = {val / (N * l2):.6g}")
    _write(args, rows, cols, {"rows": rows})
    return 0


def cmd_nls(args) -> int:
    from . import nls

    cols = ("t", "hs", "mass_rel_drift", "energy_rel_drift")
    ok = True
    rows, recs = [], []
    for N in args.N:
        spec = nls.nls_spec(N / 1.5)
        dt = args.dt if args.dt is not None else 1.0 / (4.0 * N * N)
        u0 = nls.initial_data(spec, args.band, args.amplitude, np.random.default_rng(args.seed))
        rec, st = nls.run_trajectory(u0, args.mu, args.s, args.horizon, dt, N)
        rows += [dict(zip(cols, r)) for r in st.series]
        recs.append(rec.as_dict())
        ok &= _emit(rec.passed, f"N={N:g} growth exponent {rec.exponent:.4f} vs omega {rec.omega:.4f} + 0.2; "
                                f"mass drift {rec.max_mass_drift:.2e}")
    _write(args, rows, cols, {"records": recs})
    return 0 if ok else 1


def cmd_accept(args) -> int:
    from .acceptance import acceptance_suite

    res = acceptance_suite(args.profile, args.seed, args.only)
    _write(args, [], None, {"profile": args.profile, "results": [r.as_dict() for r in res]})
    return 0 if all(r.passed for r in res) else 1


COMMANDS = {
    "constants": cmd_constants, "extremizers": cmd_extremizers, "kernel": cmd_kernel, "weyl": cmd_weyl,
    "counting": cmd_counting, "levelset": cmd_levelset, "optimize": cmd_optimize, "snorm": cmd_snorm,
    "nls": cmd_nls, "accept": cmd_accept,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.manifest is not None:
            _apply_manifest(args)
        threads = int(os.environ.get("WGL_THREADS", "1") or 1)
        with sfft.set_workers(max(1, threads)):
            return COMMANDS[args.command](args)
    except RegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, WglError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
