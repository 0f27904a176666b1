# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner-loop kernels; drop-in replacement for ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def backshift_filter(y, X, phi):
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[::1] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0], m = Xv.shape[1], p = ph.shape[0]
    cdef Py_ssize_t t, j, i, k
    cdef double acc, c
    fy = np.empty(n - p, dtype=np.float64)
    fX = np.empty((n - p, m), dtype=np.float64)
    cdef double[::1] fyv = fy
    cdef double[:, ::1] fXv = fX
    for t in range(p, n):
        k = t - p
        acc = yv[t]
        for j in range(1, p + 1):
            acc -= ph[j - 1] * yv[t - j]
        fyv[k] = acc
        for i in range(m):
            acc = Xv[t, i]
            for j in range(1, p + 1):
                acc -= ph[j - 1] * Xv[t - j, i]
            fXv[k, i] = acc
    return fy, fX


def cross_products(e, Py_ssize_t p, w=None):
    cdef const double[::1] ev = np.ascontiguousarray(e, dtype=np.float64)
    cdef Py_ssize_t n = ev.shape[0]
    cdef Py_ssize_t t, l, m
    cdef double wt, s
    cdef const double[::1] wv
    R0 = np.zeros(p, dtype=np.float64)
    R = np.zeros((p, p), dtype=np.float64)
    cdef double[::1] r0v = R0
    cdef double[:, ::1] rv = R
    cdef bint weighted = w is not None
    if weighted:
        wv = np.ascontiguousarray(w, dtype=np.float64)
    for t in range(p, n):
        if weighted:
            wt = wv[t - p]
            for l in range(1, p + 1):
                s = wt * ev[t - l]
                r0v[l - 1] += s * ev[t]
                for m in range(l, p + 1):
                    rv[l - 1, m - 1] += s * ev[t - m]
        else:
            for l in range(1, p + 1):
                s = ev[t - l]
                r0v[l - 1] += s * ev[t]
                for m in range(l, p + 1):
                    rv[l - 1, m - 1] += s * ev[t - m]
    for l in range(p):
        for m in range(l):
            rv[l, m] = rv[m, l]
    return R0, R


def t_weights(r, double sigma2, double nu):
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t n = rv.shape[0], t
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    for t in range(n):
        ov[t] = (nu + 1.0) / (nu + rv[t] * rv[t] / sigma2)
    return out


def weighted_gram(fX, fy, w=None):
    cdef const double[:, ::1] Xv = np.ascontiguousarray(fX, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(fy, dtype=np.float64)
    cdef Py_ssize_t n = Xv.shape[0], m = Xv.shape[1]
    cdef Py_ssize_t t, i, k
    cdef double s
    cdef const double[::1] wv
    cdef bint weighted = w is not None
    if weighted:
        wv = np.ascontiguousarray(w, dtype=np.float64)
    A = np.zeros((m, m), dtype=np.float64)
    b = np.zeros(m, dtype=np.float64)
    cdef double[:, ::1] Av = A
    cdef double[::1] bv = b
    for t in range(n):
        for i in range(m):
            s = wv[t] * Xv[t, i] if weighted else Xv[t, i]
            bv[i] += s * yv[t]
            for k in range(i, m):
                Av[i, k] += s * Xv[t, k]
    for i in range(m):
        for k in range(i):
            Av[i, k] = Av[k, i]
    return A, b


def weighted_ssq(r, w=None):
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t n = rv.shape[0], t
    cdef double s = 0.0
    cdef const double[::1] wv
    if w is None:
        for t in range(n):
            s += rv[t] * rv[t]
    else:
        wv = np.ascontiguousarray(w, dtype=np.float64)
        for t in range(n):
            s += wv[t] * (rv[t] * rv[t])
    return s
