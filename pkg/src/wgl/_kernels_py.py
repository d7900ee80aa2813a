"""Pure NumPy implementations of the hot loops.

Same signatures as the compiled ``_kernels`` module; used when the extension
is not built or ``WGL_PURE_PYTHON=1`` is set.
"""

import numpy as np


def nonlinear_phase(u, c, power):
    """In place: ``u *= exp(-1j * c * |u|**power)``."""
    a = np.abs(u)
    u *= np.exp(-1j * c * a**power)
    return u


def abs_pow_sum(u, p):
    """``sum(|u|**p)`` over a complex array."""
    a = np.abs(u).ravel()
    if p == 2.0:
        return float(np.dot(a, a))
    return float(np.sum(a**p))


def level_counts(absvals, lambdas, weight, out):
    """Accumulate ``out[i] += weight * #{absvals > lambdas[i]}``; ``lambdas`` ascending."""
    idx = np.searchsorted(lambdas, absvals.ravel(), side="left")
    hist = np.bincount(idx, minlength=lambdas.size + 1)
    # cells in bin k exceed lambdas[0..k-1]
    above = np.cumsum(hist[::-1])[::-1][1:]
    out += weight * above
    return out


def weyl_direct(ks, weights, t, ys):
    """``S(t, y) = sum_k weights[k] exp(2 pi i (y k - t k^2))`` for every ``y``."""
    ks = np.asarray(ks, dtype=np.int64)
    base = weights * np.exp(-2j * np.pi * ((t * (ks * ks)) % 1.0))
    ys = np.asarray(ys, dtype=float)
    out = np.empty(ys.shape, dtype=complex)
    flat = ys.ravel()
    step = 4096
    res = out.ravel()
    for s in range(0, flat.size, step):
        ph = np.exp(2j * np.pi * np.outer(flat[s:s + step], ks))
        res[s:s + step] = ph @ base
    return res.reshape(ys.shape)


def r2_bruteforce(amax):
    """Counts of ``(x, y)`` in Z^2 with ``x^2 + y^2 = A`` for ``0 <= A <= amax``."""
    amax = int(amax)
    r = int(np.floor(np.sqrt(amax)))
    while (r + 1) * (r + 1) <= amax:
        r += 1
    counts = np.zeros(amax + 1, dtype=np.int64)
    xs = np.arange(-r, r + 1, dtype=np.int64)
    for x in xs:
        s = x * x + xs * xs
        s = s[s <= amax]
        np.add.at(counts, s, 1)
    return counts
