# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched Huggins-Roy kernel.

Same contract as ``esskit._fallback.ess_h_batch``. Per row the positive
weights are sorted in decreasing order, so along an ascending beta grid the
powers u_i**beta shrink fastest at the tail; tail terms below 1e-18 (the sum
is always >= 1) are dropped for good.
"""

import numpy as np

from libc.math cimport exp, log, fabs, isinf, isnan
from libc.stdlib cimport malloc, free, qsort

cdef int ANCHOR_EVERY = 64
cdef double GAP_RTOL = 1e-12
cdef double NEGLIGIBLE = 1e-18


cdef int _cmp_desc(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*>a)[0]
    cdef double y = (<const double*>b)[0]
    if x > y:
        return -1
    if x < y:
        return 1
    return 0


cdef void _row(const double* w, Py_ssize_t n, const double* betas,
               Py_ssize_t nb, double* out, double* lu, double* t,
               double* step) noexcept nogil:
    cdef Py_ssize_t i, k, m = 0, active
    cdef double wmax = 0.0, log_wmax, entropy = 0.0, v
    cdef double b, g, prev = 0.0, gap = 0.0, s0, s1, s2, s3, s
    cdef bint have_prev = False, have_t = False, have_gap = False
    cdef int since = 0

    for i in range(n):
        v = w[i]
        if v > 0.0:
            lu[m] = v
            m += 1
            entropy -= v * log(v)
            if v > wmax:
                wmax = v
    qsort(lu, m, sizeof(double), _cmp_desc)
    log_wmax = log(wmax)
    for i in range(m):
        lu[i] = log(lu[i] / wmax)
    active = m

    for k in range(nb):
        b = betas[k]
        if b == 0.0:
            out[k] = <double>m
            continue
        if isinf(b):
            out[k] = 1.0 / wmax
            continue
        g = b - prev
        if (have_t and have_prev and g > 0.0 and since < ANCHOR_EVERY
                and have_gap and fabs(g - gap) <= GAP_RTOL * g):
            for i in range(active):
                t[i] *= step[i]
            since += 1
        else:
            if not (have_prev and g > 0.0):
                active = m
            for i in range(active):
                t[i] = exp(b * lu[i])
            since = 0
            have_t = True
            if have_prev and g > 0.0:
                gap = g
                have_gap = True
                for i in range(active):
                    step[i] = exp(g * lu[i])
            else:
                have_gap = False
        prev = b
        have_prev = True
        while active > 1 and t[active - 1] < NEGLIGIBLE:
            active -= 1
        if b == 1.0:
            out[k] = exp(entropy)
            continue
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        i = 0
        while i + 4 <= active:
            s0 += t[i]
            s1 += t[i + 1]
            s2 += t[i + 2]
            s3 += t[i + 3]
            i += 4
        while i < active:
            s0 += t[i]
            i += 1
        s = (s0 + s1) + (s2 + s3)
        out[k] = exp((b * log_wmax + log(s)) / (1.0 - b))


def ess_h_batch(weights, betas):
    """Huggins-Roy ESS of each row of ``weights`` at every order in ``betas``.

    Returns a (B, K) float64 array. Releases the GIL while computing.
    """
    cdef double[:, ::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(betas, dtype=np.float64)
    cdef Py_ssize_t nrows = w.shape[0], n = w.shape[1], nb = bv.shape[0], r
    out_arr = np.empty((nrows, nb), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    if nrows == 0 or nb == 0:
        return out_arr
    cdef double* lu = <double*>malloc(n * sizeof(double))
    cdef double* t = <double*>malloc(n * sizeof(double))
    cdef double* step = <double*>malloc(n * sizeof(double))
    if lu == NULL or t == NULL or step == NULL:
        free(lu)
        free(t)
        free(step)
        raise MemoryError()
    try:
        with nogil:
            for r in range(nrows):
                _row(&w[r, 0], n, &bv[0], nb, &out[r, 0], lu, t, step)
    finally:
        free(lu)
        free(t)
        free(step)
    return out_arr
