# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef long long _merge_count(double[::1] a, double[::1] buf, Py_ssize_t lo, Py_ssize_t hi) nogil:
    cdef Py_ssize_t mid, i, j, k
    cdef long long inv = 0
    if hi - lo < 2:
        return 0
    mid = (lo + hi) // 2
    inv += _merge_count(a, buf, lo, mid)
    inv += _merge_count(a, buf, mid, hi)
    i = lo
    j = mid
    k = lo
    while i < mid and j < hi:
        if a[j] < a[i]:
            buf[k] = a[j]
            inv += mid - i
            j += 1
        else:
            buf[k] = a[i]
            i += 1
        k += 1
    while i < mid:
        buf[k] = a[i]
        i += 1
        k += 1
    while j < hi:
        buf[k] = a[j]
        j += 1
        k += 1
    for k in range(lo, hi):
        a[k] = buf[k]
    return inv


def count_inversions(a):
    cdef double[::1] work = np.array(a, dtype=np.float64).ravel()
    cdef double[::1] buf = np.empty_like(np.asarray(work))
    cdef Py_ssize_t n = work.shape[0]
    cdef long long inv
    with nogil:
        inv = _merge_count(work, buf, 0, n)
    return int(inv)


def lasso_cd(X, y, double lam, double tol, int max_iter, beta):
    cdef double[::1, :] Xf = np.asfortranarray(X, dtype=np.float64)
    cdef double[::1] r = np.array(y, dtype=np.float64)
    cdef double[::1] b = np.array(beta, dtype=np.float64)
    cdef Py_ssize_t n = Xf.shape[0]
    cdef Py_ssize_t p = Xf.shape[1]
    cdef double[::1] z = np.zeros(p)
    cdef Py_ssize_t i, j
    cdef int it
    cdef double rho, new, d, max_change, acc
    cdef bint converged = False
    cdef int n_iter = max_iter

    with nogil:
        for j in range(p):
            acc = 0.0
            for i in range(n):
                acc = acc + Xf[i, j] * Xf[i, j]
            z[j] = acc / n
            if b[j] != 0.0:
                for i in range(n):
                    r[i] = r[i] - b[j] * Xf[i, j]
        for it in range(max_iter):
            max_change = 0.0
            for j in range(p):
                if z[j] == 0.0:
                    continue
                acc = 0.0
                for i in range(n):
                    acc = acc + Xf[i, j] * r[i]
                rho = acc / n + z[j] * b[j]
                if rho > lam:
                    new = (rho - lam) / z[j]
                elif rho < -lam:
                    new = (rho + lam) / z[j]
                else:
                    new = 0.0
                d = new - b[j]
                if d != 0.0:
                    for i in range(n):
                        r[i] = r[i] - d * Xf[i, j]
                    b[j] = new
                    if fabs(d) > max_change:
                        max_change = fabs(d)
            if max_change < tol:
                converged = True
                n_iter = it + 1
                break
    return np.asarray(b), n_iter, bool(converged)
