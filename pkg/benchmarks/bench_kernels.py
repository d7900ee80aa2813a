"""Compare the compiled kernels with the NumPy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 262144]

Prints one line per kernel with the best-of-``repeat`` time of each backend,
the speed-up, and the largest difference between their outputs.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from wgl import _kernels_py as py

try:
    from wgl import _kernels as cy
except ImportError:  # extension not built
    cy = None


def _cases(size: int, rng: np.random.Generator) -> dict:
    u = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    lam = np.geomspace(1e-3, 4.0, 256)
    ks = np.arange(-128, 129)
    w = np.exp(-(ks / 64.0) ** 2)
    ys = np.linspace(0.0, 1.0, 2048, endpoint=False)
    return {
        "nonlinear_phase": lambda k: k.nonlinear_phase(u.copy(), 0.01, 3.0),
        "abs_pow_sum": lambda k: k.abs_pow_sum(u, 5.0),
        "level_counts": lambda k: k.level_counts(np.abs(u), lam, 1.0, np.zeros(lam.size)),
        "weyl_direct": lambda k: k.weyl_direct(ks, w, 0.3712, ys),
        "r2_bruteforce": lambda k: k.r2_bruteforce(40000),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=1 << 18)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not available; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'cython [ms]':>12}{'python [ms]':>13}{'speed-up':>10}{'max diff':>12}")
    for name, fn in _cases(args.size, rng).items():
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        a, b = np.asarray(fn(cy)), np.asarray(fn(py))
        diff = float(np.max(np.abs(a - b))) if a.size else 0.0
        print(f"{name:<18}{1e3 * tc:>12.3f}{1e3 * tp:>13.3f}{tp / tc:>10.2f}{diff:>12.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
