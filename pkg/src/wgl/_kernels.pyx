# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Semantics match ``wgl._kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, cos, sin, floor, fabs, exp, log, M_PI

cnp.import_array()


cdef inline double _ipow(double x, int k) nogil:
    cdef double r = 1.0
    while k > 0:
        if k & 1:
            r *= x
        x *= x
        k >>= 1
    return r


def nonlinear_phase(cnp.ndarray u, double c, double power):
    cdef double complex[::1] v = u.reshape(-1)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double re, im, a2, ph, cs, sn
    cdef bint cube = power == 3.0
    cdef bint quad = power == 4.0
    with nogil:
        for i in range(n):
            re = v[i].real
            im = v[i].imag
            a2 = re * re + im * im
            if quad:
                ph = c * a2 * a2
            elif cube:
                ph = c * a2 * sqrt(a2)
            else:
                ph = c * pow(a2, 0.5 * power)
            cs = cos(ph)
            sn = sin(ph)
            v[i] = (re * cs + im * sn) + 1j * (im * cs - re * sn)
    return u


def abs_pow_sum(cnp.ndarray u, double p):
    cdef const double complex[::1] v = np.ascontiguousarray(u).reshape(-1)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double acc = 0.0, a2, hp = 0.5 * p
    cdef int k
    with nogil:
        if p == 2.0:
            for i in range(n):
                acc += v[i].real * v[i].real + v[i].imag * v[i].imag
        elif p == 4.0:
            for i in range(n):
                a2 = v[i].real * v[i].real + v[i].imag * v[i].imag
                acc += a2 * a2
        elif p == 6.0:
            for i in range(n):
                a2 = v[i].real * v[i].real + v[i].imag * v[i].imag
                acc += a2 * a2 * a2
        elif p == floor(p) and 0.0 < p <= 64.0:
            # integer p: repeated squaring of a2, times sqrt(a2) when p is odd
            k = <int>p
            for i in range(n):
                a2 = v[i].real * v[i].real + v[i].imag * v[i].imag
                acc += _ipow(a2, k >> 1) * (sqrt(a2) if k & 1 else 1.0)
        else:
            for i in range(n):
                a2 = v[i].real * v[i].real + v[i].imag * v[i].imag
                if a2 > 0.0:
                    acc += exp(hp * log(a2))
    return float(acc)


def level_counts(cnp.ndarray absvals, cnp.ndarray lambdas, double weight, cnp.ndarray out):
    cdef const double[::1] a = np.ascontiguousarray(absvals, dtype=np.float64).reshape(-1)
    cdef const double[::1] lam = np.ascontiguousarray(lambdas, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t nl = lam.shape[0], n = a.shape[0]
    cdef cnp.int64_t[::1] hist = np.zeros(nl + 1, dtype=np.int64)
    cdef Py_ssize_t i, lo, hi, mid
    cdef double x
    cdef cnp.int64_t run
    with nogil:
        for i in range(n):
            x = a[i]
            # number of lambdas strictly below x
            lo = 0
            hi = nl
            while lo < hi:
                mid = (lo + hi) >> 1
                if lam[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            hist[lo] += 1
        run = 0
        for i in range(nl, 0, -1):
            run += hist[i]
            o[i - 1] += weight * run
    return out


def weyl_direct(ks, weights, double t, ys):
    cdef const cnp.int64_t[::1] k = np.ascontiguousarray(ks, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    yarr = np.ascontiguousarray(ys, dtype=np.float64)
    cdef const double[::1] y = yarr.reshape(-1)
    out = np.empty(y.shape[0], dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t nk = k.shape[0], ny = y.shape[0], i, j
    cdef double[::1] bre = np.empty(nk)
    cdef double[::1] bim = np.empty(nk)
    cdef double ph, sr, si, c, s, kk, frac
    with nogil:
        for j in range(nk):
            kk = <double>(k[j] * k[j])
            frac = t * kk
            frac = frac - floor(frac)
            ph = -2.0 * M_PI * frac
            bre[j] = w[j] * cos(ph)
            bim[j] = w[j] * sin(ph)
        for i in range(ny):
            sr = 0.0
            si = 0.0
            for j in range(nk):
                frac = y[i] * k[j]
                frac = frac - floor(frac)
                ph = 2.0 * M_PI * frac
                c = cos(ph)
                s = sin(ph)
                sr += bre[j] * c - bim[j] * s
                si += bre[j] * s + bim[j] * c
            o[i] = sr + 1j * si
    return out.reshape(yarr.shape)


def r2_bruteforce(amax):
    cdef cnp.int64_t A = amax
    cdef cnp.int64_t r = <cnp.int64_t>floor(sqrt(<double>A))
    while (r + 1) * (r + 1) <= A:
        r += 1
    counts = np.zeros(A + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] cnt = counts
    cdef cnp.int64_t x, y, s
    with nogil:
        for x in range(-r, r + 1):
            for y in range(-r, r + 1):
                s = x * x + y * y
                if s <= A:
                    cnt[s] += 1
    return counts
