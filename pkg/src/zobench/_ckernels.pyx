# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contract as ``zobench._pykernels``.

Elementwise update arithmetic follows the numpy fallback operation for
operation, so optimizer steps agree bitwise across backends.  Objective sums
are accumulated sequentially and may differ from numpy's pairwise sums in the
last few ulps.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, sqrt, fabs, M_PI

cnp.import_array()

NAME = "cython"

cdef enum:
    QUADRATIC = 0
    CUBIC = 1
    LEVY = 2
    ROSENBROCK = 3


cdef double _value(int kind, const double[::1] x) noexcept nogil:
    cdef Py_ssize_t d = x.shape[0], i
    cdef double acc = 0.0, a, w, s, lo, hi, r
    if kind == QUADRATIC:
        for i in range(d):
            acc += x[i] * x[i]
        return 0.5 * acc
    if kind == CUBIC:
        for i in range(d):
            a = fabs(x[i])
            acc += a * a * a + 0.5 * x[i] * x[i]
        return acc
    if kind == LEVY:
        w = 1.0 + (x[0] - 1.0) * 0.25
        s = sin(M_PI * w)
        acc = s * s
        for i in range(1, d - 1):
            w = 1.0 + (x[i] - 1.0) * 0.25
            s = sin(M_PI * w + 1.0)
            acc += (w - 1.0) * (w - 1.0) * (1.0 + 10.0 * s * s)
        w = 1.0 + (x[d - 1] - 1.0) * 0.25
        s = sin(2.0 * M_PI * w)
        acc += (w - 1.0) * (w - 1.0) * (1.0 + s * s)
        return acc
    # ROSENBROCK
    for i in range(d - 1):
        lo = x[i]
        hi = x[i + 1]
        r = hi - lo * lo
        acc += 100.0 * r * r + (1.0 - lo) * (1.0 - lo)
    return acc


def values(int kind, X):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown objective code {kind}")
    cdef const double[:, ::1] pts = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0], j
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for j in range(n):
            o[j] = _value(kind, pts[j])
    return out


def gradient(int kind, theta):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown objective code {kind}")
    cdef const double[::1] x = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t d = x.shape[0], i
    out = np.zeros(d)
    cdef double[::1] g = out
    cdef double w, s, lo, r
    with nogil:
        if kind == QUADRATIC:
            for i in range(d):
                g[i] = x[i]
        elif kind == CUBIC:
            for i in range(d):
                g[i] = 3.0 * x[i] * fabs(x[i]) + x[i]
        elif kind == LEVY:
            w = 1.0 + (x[0] - 1.0) * 0.25
            g[0] += M_PI * sin(2.0 * M_PI * w)
            for i in range(1, d - 1):
                w = 1.0 + (x[i] - 1.0) * 0.25
                s = sin(M_PI * w + 1.0)
                g[i] += 2.0 * (w - 1.0) * (1.0 + 10.0 * s * s) + 10.0 * M_PI * (w - 1.0) * (w - 1.0) * sin(2.0 * (M_PI * w + 1.0))
            w = 1.0 + (x[d - 1] - 1.0) * 0.25
            s = sin(2.0 * M_PI * w)
            g[d - 1] += 2.0 * (w - 1.0) * (1.0 + s * s) + 2.0 * M_PI * (w - 1.0) * (w - 1.0) * sin(4.0 * M_PI * w)
            for i in range(d):
                g[i] *= 0.25
        else:
            for i in range(d - 1):
                lo = x[i]
                r = x[i + 1] - lo * lo
                g[i] += -400.0 * lo * r - 2.0 * (1.0 - lo)
                g[i + 1] += 200.0 * r
    return out


def fd_estimate(int kind, theta, U, double mu, double xi):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown objective code {kind}")
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef const double[:, ::1] dirs = np.ascontiguousarray(U, dtype=np.float64)
    cdef Py_ssize_t k = dirs.shape[0], d = dirs.shape[1], j, i
    if th.shape[0] != d:
        raise ValueError("theta and directions disagree in dimension")
    g_arr = np.zeros(d)
    f_arr = np.empty(k + 1)
    buf_arr = np.empty(d)
    cdef double[::1] g = g_arr
    cdef double[::1] fv = f_arr
    cdef double[::1] buf = buf_arr
    cdef double f0, coef, scale = <double>d / <double>k
    with nogil:
        f0 = _value(kind, th) + xi
        fv[0] = f0
        for j in range(k):
            for i in range(d):
                buf[i] = th[i] + dirs[j, i] * mu
            fv[j + 1] = _value(kind, buf) + xi
            coef = (fv[j + 1] - f0) / mu
            for i in range(d):
                g[i] += coef * dirs[j, i]
        for i in range(d):
            g[i] *= scale
    return g_arr, f_arr


def moment_step(int mode, theta, g, m, v, double beta1, double beta2, double eta, double zeta):
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef const double[::1] gg = np.ascontiguousarray(g, dtype=np.float64)
    cdef Py_ssize_t d = th.shape[0], i
    cdef double[::1] mm
    cdef double[::1] vv
    cdef double gi, si
    out_arr = np.empty(d)
    cdef double[::1] out = out_arr
    cdef double a1 = 1.0 - beta1, a2 = 1.0 - beta2
    if mode == 0:
        for i in range(d):
            out[i] = th[i] - eta * gg[i]
    elif mode == 1:
        for i in range(d):
            gi = gg[i]
            si = 1.0 if gi > 0.0 else (-1.0 if gi < 0.0 else (0.0 if gi == 0.0 else gi))
            out[i] = th[i] - eta * si
    elif mode == 2:
        vv = v
        for i in range(d):
            gi = gg[i]
            vv[i] = vv[i] * beta2 + a2 * (gi * gi)
            out[i] = th[i] - eta * gi / sqrt(vv[i] + zeta)
    elif mode == 3 or mode == 4:
        mm = m
        vv = v
        for i in range(d):
            gi = gg[i]
            mm[i] = mm[i] * beta1 + a1 * gi
            if mode == 3:
                vv[i] = vv[i] * beta2 + a2 * (gi * gi)
            else:
                vv[i] = vv[i] * beta2 + a2 * (mm[i] * mm[i])
            out[i] = th[i] - eta * mm[i] / sqrt(vv[i] + zeta)
    else:
        raise ValueError(f"unknown update mode {mode}")
    return out_arr
