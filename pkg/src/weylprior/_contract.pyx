# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled weighted contraction kernels.

Hot loops for the quadrature-based tensor evaluations: given per-node
weights w (q,) and per-node score vectors s (q, m), accumulate

    pair_contract:   G[i, j]    = sum_n w[n] s[n, i] s[n, j]
    triple_contract: T[i, j, k] = sum_n w[n] s[n, i] s[n, j] s[n, k]

Only the ordered index triangles are accumulated and the rest mirrored,
so the results are exactly symmetric.
"""

import numpy as np


def pair_contract(double[::1] w, double[:, ::1] s):
    cdef Py_ssize_t q = s.shape[0]
    cdef Py_ssize_t m = s.shape[1]
    out = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t n, i, j
    cdef double wsi
    for n in range(q):
        for i in range(m):
            wsi = w[n] * s[n, i]
            for j in range(i, m):
                o[i, j] += wsi * s[n, j]
    for i in range(m):
        for j in range(i):
            o[i, j] = o[j, i]
    return out


def triple_contract(double[::1] w, double[:, ::1] s):
    cdef Py_ssize_t q = s.shape[0]
    cdef Py_ssize_t m = s.shape[1]
    out = np.zeros((m, m, m), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    cdef Py_ssize_t n, i, j, k
    cdef double wsi, wsij
    for n in range(q):
        for i in range(m):
            wsi = w[n] * s[n, i]
            for j in range(i, m):
                wsij = wsi * s[n, j]
                for k in range(j, m):
                    o[i, j, k] += wsij * s[n, k]
    # mirror the sorted triangle i <= j <= k onto all permutations
    for i in range(m):
        for j in range(i, m):
            for k in range(j, m):
                o[i, k, j] = o[i, j, k]
                o[j, i, k] = o[i, j, k]
                o[j, k, i] = o[i, j, k]
                o[k, i, j] = o[i, j, k]
                o[k, j, i] = o[i, j, k]
    return out
