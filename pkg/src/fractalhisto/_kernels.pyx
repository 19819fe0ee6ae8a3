# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: the chaos-game orbit and nearest-point d_eta search."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sin, tanh, fabs

cnp.import_array()

cdef double POLE_GUARD = 1e-9


cdef inline double _contract(cnp.int64_t code, double p, double x) noexcept nogil:
    if code == 0:
        return p * x
    elif code == 1:
        return p * sin(x)
    elif code == 3:
        return p * tanh(x)
    return 1.0 / (p + x)


def chaos_orbit(const double[::1] a, const double[::1] b, const double[::1] c, const double[::1] d,
                const cnp.int64_t[::1] s_code, const double[::1] s_par,
                const cnp.int64_t[::1] dl_code, const double[::1] dl_par,
                const cnp.int64_t[::1] choices, double t, double x, Py_ssize_t burn_in):
    """Run the orbit; return ``(points, bad_step)`` with ``bad_step = -1`` on success."""
    cdef Py_ssize_t total = choices.shape[0]
    cdef Py_ssize_t n = total - burn_in
    out = np.empty((n if n > 0 else 0, 2))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i
    cdef cnp.int64_t j
    cdef double scale, tn
    for i in range(total):
        j = choices[i]
        if s_code[j] == 2 and fabs(s_par[j] + x) < POLE_GUARD:
            return out, i
        if dl_code[j] == 0:
            scale = dl_par[j]
        else:
            scale = dl_par[j] * t
        tn = a[j] * t + b[j]
        x = c[j] * t + scale * _contract(s_code[j], s_par[j], x) + d[j]
        t = tn
        if i >= burn_in:
            o[i - burn_in, 0] = t
            o[i - burn_in, 1] = x
    return out, -1


def min_deta(const double[:, ::1] pts, const double[::1] bt, const double[::1] bx, double eta, int threads=1):
    """For every row of ``pts`` the minimum ``|t - t'| + eta |x - x'|`` over ``b``.

    ``bt`` must be sorted ascending.  The search walks outward from the
    insertion point and stops once the abscissa gap alone reaches the best
    distance found, so the result equals the exhaustive minimum.
    """
    cdef Py_ssize_t n = pts.shape[0], m = bt.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i, lo, hi, mid, k
    cdef double t, x, best, dt, dist
    for i in prange(n, nogil=True, num_threads=threads, schedule="static"):
        t = pts[i, 0]
        x = pts[i, 1]
        lo = 0
        hi = m
        while lo < hi:
            mid = (lo + hi) // 2
            if bt[mid] < t:
                lo = mid + 1
            else:
                hi = mid
        best = 1e308
        k = lo
        while k < m:
            dt = fabs(t - bt[k])
            if dt >= best:
                break
            dist = dt + eta * fabs(x - bx[k])
            if dist < best:
                best = dist
            k = k + 1
        k = lo - 1
        while k >= 0:
            dt = fabs(t - bt[k])
            if dt >= best:
                break
            dist = dt + eta * fabs(x - bx[k])
            if dist < best:
                best = dist
            k = k - 1
        o[i] = best
    return out
