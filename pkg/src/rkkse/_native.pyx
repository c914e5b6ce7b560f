# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot numeric kernels.

Mirrors rkkse._purecore exactly; selected by rkkse._core when importable.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport lgamma, exp, pow, fmin
from scipy.special.cython_special cimport betainc

cnp.import_array()

BACKEND = "native"


cdef Py_ssize_t _piece_index(const double[::1] breaks, double x) nogil:
    cdef Py_ssize_t lo = 0, hi = breaks.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if breaks[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    lo -= 1
    if lo < 0:
        lo = 0
    if lo > breaks.shape[0] - 2:
        lo = breaks.shape[0] - 2
    return lo


cdef double _pp_eval_c(const double[::1] breaks, const double[:, ::1] coefs,
                       double x, int deriv) nogil:
    cdef Py_ssize_t i = _piece_index(breaks, x)
    cdef double u = x - breaks[i]
    cdef double acc = 0.0, c, f
    cdef Py_ssize_t k, j
    for k in range(coefs.shape[1] - 1, deriv - 1, -1):
        c = coefs[i, k]
        if deriv:
            f = 1.0
            for j in range(k, k - deriv, -1):
                f *= j
            c *= f
        acc = acc * u + c
    return acc


def pp_eval(const double[::1] breaks, const double[:, ::1] coefs, double x, int deriv=0):
    """Evaluate a piecewise polynomial (or its deriv-th derivative) at scalar x."""
    return _pp_eval_c(breaks, coefs, x, deriv)


def pp_eval_array(const double[::1] breaks, const double[:, ::1] coefs, xs, int deriv=0):
    """Vectorized pp_eval over a 1-D array of points."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(arr)
    cdef double[::1] xv = arr
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _pp_eval_c(breaks, coefs, xv[i], deriv)
    return out


cdef double _caputo_pp_c(const double[::1] breaks, const double[:, ::1] coefs,
                         double alpha, double t) nogil:
    cdef double q = 1.0 - alpha
    cdef double total = 0.0, c, d, tc, sig, w, am, bfac
    cdef Py_ssize_t i, m
    for i in range(breaks.shape[0] - 1):
        c = breaks[i]
        if c >= t:
            break
        d = breaks[i + 1]
        tc = t - c
        sig = (fmin(d, t) - c) / tc
        if sig > 1.0:
            sig = 1.0
        w = pow(tc, 1.0 - alpha)
        for m in range(1, coefs.shape[1]):
            am = coefs[i, m] * m
            if am != 0.0:
                bfac = betainc(m, q, sig) * exp(lgamma(m) + lgamma(q) - lgamma(m + q))
                total += am * w * bfac
            w *= tc
    return total / exp(lgamma(q))


def caputo_pp(const double[::1] breaks, const double[:, ::1] coefs, double alpha, double t):
    """Exact Caputo derivative of a piecewise polynomial; 0 < alpha < 1."""
    return _caputo_pp_c(breaks, coefs, alpha, t)


cdef double _r2_caputo_c(double t0, double tval, double alpha) nogil:
    # closed form; stable for t0 - tval down to a few ulps
    cdef double q = 1.0 - alpha
    cdef double p0, acc, eps
    if t0 <= 0.0:
        return 0.0
    p0 = tval + tval * t0 - 0.5 * t0 * t0
    acc = (p0 * pow(t0, q) / q
           - (tval - t0) * pow(t0, q + 1.0) / (q + 1.0)
           - pow(t0, q + 2.0) / (2.0 * (q + 2.0)))
    if t0 > tval:
        eps = t0 - tval
        acc -= (p0 * pow(eps, q) / q
                - (tval - t0) * pow(eps, q + 1.0) / (q + 1.0)
                - pow(eps, q + 2.0) / (2.0 * (q + 2.0)))
        acc += (tval + 0.5 * tval * tval) * pow(eps, q) / q
    return acc / exp(lgamma(q))


cdef double _r2_caputo_dt_c(double t0, double tval, double alpha) nogil:
    cdef double q = 1.0 - alpha
    cdef double acc
    if t0 <= 0.0:
        return 0.0
    acc = (1.0 + t0) * pow(t0, q) / q - pow(t0, q + 1.0) / (q + 1.0)
    if tval < t0:
        acc -= pow(t0 - tval, q + 1.0) / (q * (q + 1.0))
    return acc / exp(lgamma(q))


def r2_caputo(double t0, double tval, double alpha):
    """Caputo (order alpha, in u, evaluated at u=t0) of u -> R2(u, tval)."""
    return _r2_caputo_c(t0, tval, alpha)


def r2_caputo_dt_array(double t0, ts, double alpha):
    """Caputo-in-u at u=t0 of u -> dR2(u,t)/dt, for each t in ts (closed form)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.ascontiguousarray(ts, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(arr)
    cdef double[::1] tv = arr
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(tv.shape[0]):
        ov[i] = _r2_caputo_dt_c(t0, tv[i], alpha)
    return out
