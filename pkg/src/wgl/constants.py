"""Piecewise power-law bounds for the long-time Strichartz constant.

Every branch is a monomial ``T^a N^b`` with rational exponents kept as
``Fraction`` so that continuity at the regime thresholds can be checked
exactly.  ``N^eps`` losses are not represented.

Sources
-------
``C0``           generic bound on R^m x T^n (branches in ``p``)
``C1``           improved bound on R^2 x T, ``10/3 < p < 4``
``C2``           improved bound on R x T^2, ``10/3 < p < 4``
``C3``           improved bound on R x T^2, ``4 < p < 6``
``p4``           ``L^4`` bound on R x T^n, ``n >= 2``
``conjecture``   sum of the three lower-bound monomials
``corollary-window``  exponent ``c`` of the time window ``[0, N^c]`` on which
                 the bound ``N^(3/2 - 5/p)`` holds
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import RegimeError

__all__ = [
    "SOURCES",
    "Monomial",
    "TheoryConstant",
    "as_fraction",
    "theory_constant",
    "branches",
    "continuity_report",
    "lower_exponents",
]

SOURCES = ("C0", "C1", "C2", "C3", "p4", "conjecture", "corollary-window")
F = Fraction


def as_fraction(p) -> Fraction:
    """Exact rational for ``p``; floats are rounded to the nearest small-denominator fraction."""
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, str):
        return Fraction(p)
    return Fraction(float(p)).limit_denominator(10**6)


@dataclass(frozen=True)
class Monomial:
    """``T^t_exp * N^n_exp``."""

    t_exp: Fraction
    n_exp: Fraction

    def value(self, T: float, N: float) -> float:
        return float(T) ** float(self.t_exp) * float(N) ** float(self.n_exp)

    def at_threshold(self, tau: Fraction) -> Fraction:
        """Combined ``N``-exponent when ``T = N^tau``."""
        return self.t_exp * tau + self.n_exp


@dataclass(frozen=True)
class TheoryConstant:
    source: str
    regime: str
    terms: tuple             # Monomials, summed
    value: float
    window: Fraction | None = None   # corollary-window only (None means infinite)

    @property
    def exponents(self) -> tuple:
        """``(T-exponent, N-exponent)`` of the leading term."""
        if not self.terms:
            return None
        t = self.terms[0]
        return t.t_exp, t.n_exp


# ----------------------------------------------------------- common exponents


def lower_exponents(m: int, n: int, p: Fraction) -> dict:
    """Exponents of the three extremizer lower bounds."""
    d = m + n
    a = F(m + 2, 2) / p - F(m, 4)
    return {
        "T": Monomial(a, F(0)),
        "TN": Monomial(a, F(n, 2) - F(n + 2) / p),
        "N": Monomial(F(0), F(d, 2) - F(d + 2) / p),
    }


def _need(cond: bool, msg: str):
    if not cond:
        raise RegimeError(msg)


def branches(source: str, m: int, n: int, p) -> list:
    """Ordered ``[(label, upper_tau, monomial), ...]`` for T-piecewise sources.

    A branch applies for ``N^tau_prev < T <= N^upper_tau``; the final branch
    has ``upper_tau=None``.
    """
    p = as_fraction(p)
    s32 = F(3, 2) - 5 / p
    if source == "C1":
        _need((m, n) == (2, 1), "C1 applies to R^2 x T")
        _need(F(10, 3) < p < 4, "C1 needs 10/3 < p < 4")
        return [
            ("short", F(9, 4) * p - F(15, 2), Monomial(F(0), s32)),
            ("middle", F(3, 2), Monomial(1 / (3 * p), F(3, 4) - F(5, 2) / p)),
            ("long", None, Monomial(2 / p - F(1, 2), s32)),
        ]
    if source == "C2":
        _need((m, n) == (1, 2), "C2 applies to R x T^2")
        _need(F(10, 3) < p < 4, "C2 needs 10/3 < p < 4")
        return [
            ("short", F(3, 4) * p - F(5, 2), Monomial(F(0), s32)),
            ("middle", F(1, 2), Monomial(2 / (3 * p), 1 - F(10, 3) / p)),
            ("long", F(2), Monomial(4 / p - 1, s32)),
            ("very-long", None, Monomial(F(3, 2) / p - F(1, 4), F(0))),
        ]
    if source == "C3":
        _need((m, n) == (1, 2), "C3 applies to R x T^2")
        _need(F(4) < p < 6, "C3 needs 4 < p < 6")
        return [
            ("short", p - 2, Monomial(F(0), s32)),
            ("middle", F(4), Monomial(1 / (2 * p), 1 - 4 / p)),
            ("long", None, Monomial(F(3, 2) / p - F(1, 4), 2 - 8 / p)),
        ]
    raise ValueError(f"{source!r} is not piecewise in T")


def _c0(m, n, p):
    _need(m >= 1 and n >= 1, "need m, n >= 1")
    _need(p > 2, "C0 needs p > 2")
    d = m + n
    lo = lower_exponents(m, n, p)
    if p <= 2 + F(4, d):
        return "subcritical", (lo["T"],)
    if p < 2 + F(4, m):
        return "intermediate", (Monomial(lo["T"].t_exp, lo["N"].n_exp),)
    return "supercritical", (lo["N"],)


def _window(m, n, p):
    if (m, n) == (1, 2):
        _need(p > F(10, 3), "window needs p > 10/3")
        if p <= 4:
            return "c", (3 * p - 10) / 4
        if p < 6:
            return "c", p - 2
        return "c", None
    if (m, n) == (2, 1):
        _need(p > F(10, 3), "window needs p > 10/3")
        if p < 4:
            return "c-tilde", 3 * (3 * p - 10) / 4
        return "c-tilde", None
    raise RegimeError("windows are stated for R x T^2 and R^2 x T only")


def theory_constant(source: str, m: int, n: int, p, T: float = 1.0, N: float = 1.0) -> TheoryConstant:
    """Evaluate one theory-side bound at ``(p, T, N)``.

    Raises
    ------
    RegimeError
        When ``(m, n, p)`` lies outside the range where ``source`` is stated.
    """
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}")
    pf = as_fraction(p)
    if source == "C0":
        label, terms = _c0(m, n, pf)
    elif source in ("C1", "C2", "C3"):
        br = branches(source, m, n, pf)
        label, terms = br[-1][0], (br[-1][2],)
        lt = math.log(T) / math.log(N) if N > 1 else math.inf
        for lab, tau, mono in br:
            if tau is not None and lt <= float(tau) + 1e-12:
                label, terms = lab, (mono,)
                break
    elif source == "p4":
        _need(m == 1 and n >= 2, "the L^4 bound is stated for R x T^n with n >= 2")
        _need(pf == 4, "the L^4 bound needs p = 4")
        terms = (Monomial(F(1, 8), F(n - 2, 4)), Monomial(F(0), F(n - 1, 4)))
        label = "p=4"
    elif source == "conjecture":
        _need(pf >= 2, "the conjecture is stated for p >= 2")
        lo = lower_exponents(m, n, pf)
        terms = (lo["T"], lo["TN"], lo["N"])
        label = "sum"
    else:
        label, c = _window(m, n, pf)
        return TheoryConstant(source, label, (), math.inf if c is None else float(c), c)
    value = sum(t.value(T, N) for t in terms)
    return TheoryConstant(source, label, tuple(terms), value)


def continuity_report(source: str, m: int, n: int, p) -> list:
    """Exact comparison of adjacent branches at each threshold.

    For T-piecewise sources each entry is ``(tau, left, right, equal)`` with
    the combined ``N``-exponents at ``T = N^tau``.  For ``C0`` the thresholds
    are in ``p`` and both neighbouring branches are evaluated at the boundary.
    """
    pf = as_fraction(p)
    out = []
    if source == "C0":
        d = m + n
        for pb in (2 + F(4, d), 2 + F(4, m)):
            lo = lower_exponents(m, n, pb)
            t_only, n_only = (lo["T"].t_exp, F(0)), (F(0), lo["N"].n_exp)
            mixed = (lo["T"].t_exp, lo["N"].n_exp)
            left, right = (t_only, mixed) if pb == 2 + F(4, d) else (mixed, n_only)
            out.append((pb, left, right, left == right))
        return out
    br = branches(source, m, n, pf)
    for (_, tau, a), (_, _, b) in zip(br[:-1], br[1:]):
        la, lb = a.at_threshold(tau), b.at_threshold(tau)
        out.append((tau, la, lb, la == lb))
    return out
