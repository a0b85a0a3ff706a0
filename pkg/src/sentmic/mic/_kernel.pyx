# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled column-optimization DP. See ``_kernel_py.dp_best`` for the contract;
the arithmetic order here mirrors it exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()


def dp_best(cum_in, xlogx_in, int max_cols):
    cdef const cnp.int64_t[:, ::1] cum = np.ascontiguousarray(cum_in, dtype=np.int64)
    cdef const double[::1] xlogx = np.ascontiguousarray(xlogx_in, dtype=np.float64)
    cdef Py_ssize_t k = cum.shape[0] - 1
    cdef Py_ssize_t q = cum.shape[1]
    cdef double[:, ::1] cost = np.empty((k + 1, k + 1), dtype=np.float64)
    cdef double[::1] prev = np.empty(k + 1, dtype=np.float64)
    cdef double[::1] cur = np.empty(k + 1, dtype=np.float64)
    cdef cnp.int64_t[::1] tot = np.empty(k + 1, dtype=np.int64)
    best_arr = np.full(max_cols + 1, -np.inf)
    cdef double[::1] best = best_arr
    cdef Py_ssize_t s, t, r, l
    cdef cnp.int64_t acc_i
    cdef double acc, m, v

    with nogil:
        for t in range(k + 1):
            acc_i = 0
            for r in range(q):
                acc_i = acc_i + cum[t, r]
            tot[t] = acc_i
        for s in range(k + 1):
            for t in range(k + 1):
                if s >= t:
                    cost[s, t] = -INFINITY
                    continue
                acc = 0.0
                for r in range(q):
                    acc = acc + xlogx[cum[t, r] - cum[s, r]]
                cost[s, t] = acc - xlogx[tot[t] - tot[s]]

        for t in range(k + 1):
            prev[t] = cost[0, t]
        prev[0] = -INFINITY
        if max_cols >= 1:
            best[1] = prev[k]
        for l in range(2, max_cols + 1):
            for t in range(k + 1):
                m = -INFINITY
                for s in range(t):
                    v = prev[s] + cost[s, t]
                    if v > m:
                        m = v
                cur[t] = m
            best[l] = best[l - 1] if best[l - 1] > cur[k] else cur[k]
            for t in range(k + 1):
                prev[t] = cur[t]
    return best_arr


def greedy_groups(sizes_in, Py_ssize_t k):
    cdef const cnp.int64_t[::1] sizes = np.ascontiguousarray(sizes_in, dtype=np.int64)
    cdef Py_ssize_t m = sizes.shape[0]
    groups_arr = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] groups = groups_arr
    cdef double remaining = 0.0
    cdef double desired, gap_with, gap_without
    cdef cnp.int64_t current = 0, total = 0
    cdef Py_ssize_t i, g = 0
    with nogil:
        for i in range(m):
            total = total + sizes[i]
        remaining = <double>total
        desired = remaining / k
        for i in range(m):
            if current > 0 and g < k - 1:
                gap_with = fabs(<double>(current + sizes[i]) - desired)
                gap_without = fabs(<double>current - desired)
                if gap_with >= gap_without:
                    g = g + 1
                    remaining = remaining - current
                    desired = remaining / (k - g)
                    current = 0
            groups[i] = g
            current = current + sizes[i]
    return groups_arr
