# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_kernels_py``."""
import numpy as np
from libc.math cimport fabs, isfinite


def prox_offdiag(const double[:, ::1] y, double gamma, double lam):
    cdef Py_ssize_t n = y.shape[0], i, j
    cdef double v, a
    cdef bint bounded = isfinite(lam)
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(n):
            v = y[i, j]
            if i == j:
                out[i, j] = v
                continue
            a = fabs(v) - gamma
            if a <= 0.0:
                out[i, j] = 0.0
                continue
            if bounded and a > lam:
                a = lam
            out[i, j] = a if v > 0.0 else -a
    return out_arr


def kron_block(const double[:, ::1] sigma, const Py_ssize_t[:, ::1] rows,
               const Py_ssize_t[:, ::1] cols):
    cdef Py_ssize_t nr = rows.shape[0], nc = cols.shape[0], a, b, i, j
    out_arr = np.empty((nr, nc), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for a in range(nr):
        i = rows[a, 0]
        j = rows[a, 1]
        for b in range(nc):
            out[a, b] = sigma[i, cols[b, 0]] * sigma[j, cols[b, 1]]
    return out_arr


def gabp_sweep(const double[::1] jdiag, const double[::1] h,
               const Py_ssize_t[::1] src, const Py_ssize_t[::1] dst,
               const double[::1] weight, const Py_ssize_t[::1] rev,
               const double[::1] msg_p, const double[::1] msg_h,
               double[::1] new_p, double[::1] new_h, double damping):
    cdef Py_ssize_t p = jdiag.shape[0], m = src.shape[0], e, s
    cdef double cav_p, cav_h, w, change = 0.0, d
    prec_arr = np.empty(p, dtype=np.float64)
    pot_arr = np.empty(p, dtype=np.float64)
    cdef double[::1] prec = prec_arr
    cdef double[::1] pot = pot_arr
    for s in range(p):
        prec[s] = jdiag[s]
        pot[s] = h[s]
    for e in range(m):
        prec[dst[e]] += msg_p[e]
        pot[dst[e]] += msg_h[e]
    for e in range(m):
        s = src[e]
        cav_p = prec[s] - msg_p[rev[e]]
        if cav_p <= 0.0:
            return -1.0
        cav_h = pot[s] - msg_h[rev[e]]
        w = weight[e]
        new_p[e] = -(w * w) / cav_p
        new_h[e] = -w * cav_h / cav_p
        if damping != 0.0:
            new_p[e] = (1.0 - damping) * new_p[e] + damping * msg_p[e]
            new_h[e] = (1.0 - damping) * new_h[e] + damping * msg_h[e]
        d = fabs(new_p[e] - msg_p[e])
        if d > change:
            change = d
        d = fabs(new_h[e] - msg_h[e])
        if d > change:
            change = d
    return change


def gabp_beliefs(const double[::1] jdiag, const double[::1] h,
                 const Py_ssize_t[::1] dst, const double[::1] msg_p,
                 const double[::1] msg_h):
    cdef Py_ssize_t p = jdiag.shape[0], m = dst.shape[0], e, s
    prec_arr = np.array(jdiag, dtype=np.float64)
    pot_arr = np.array(h, dtype=np.float64)
    cdef double[::1] prec = prec_arr
    cdef double[::1] pot = pot_arr
    for e in range(m):
        prec[dst[e]] += msg_p[e]
        pot[dst[e]] += msg_h[e]
    return prec_arr, pot_arr
