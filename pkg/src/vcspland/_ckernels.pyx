# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for fitness tables, improving edges and longest paths."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64

NAME = "cython"


def fitness_table(const i64[:] domains, const i64[:] strides, const i64[:] scope_ptr, const i64[:] scope_vars,
                  const i64[:] table_ptr, const i64[:] table_vals):
    cdef Py_ssize_t n = domains.shape[0]
    cdef Py_ssize_t m = scope_ptr.shape[0] - 1
    cdef i64 V = 1
    cdef Py_ssize_t k
    for k in range(n):
        V *= domains[k]
    F_arr = np.zeros(V, dtype=np.int64)
    cdef i64[:] F = F_arr
    digit_arr = np.zeros(max(n, 1), dtype=np.int64)
    cdef i64[:] digit = digit_arr
    cdef i64 x, idx, total
    cdef Py_ssize_t c, p
    for x in range(V):
        # odometer update of the digits instead of a divmod per variable
        if x > 0:
            k = n - 1
            while k >= 0:
                digit[k] += 1
                if digit[k] < domains[k]:
                    break
                digit[k] = 0
                k -= 1
        total = 0
        for c in range(m):
            idx = 0
            for p in range(scope_ptr[c], scope_ptr[c + 1]):
                idx = idx * domains[scope_vars[p]] + digit[scope_vars[p]]
            total += table_vals[table_ptr[c] + idx]
        F[x] = total
    return F_arr


def improving_edges(const i64[:] F, const i64[:] domains, const i64[:] strides):
    cdef i64 V = F.shape[0]
    cdef Py_ssize_t n = domains.shape[0]
    indptr_arr = np.zeros(V + 1, dtype=np.int64)
    cdef i64[:] indptr = indptr_arr
    cdef i64 x, y, v, dk, sk, cur, count
    cdef Py_ssize_t k
    count = 0
    for x in range(V):
        for k in range(n):
            dk = domains[k]
            sk = strides[k]
            cur = (x // sk) % dk
            for v in range(dk):
                if v != cur:
                    y = x + (v - cur) * sk
                    if F[y] > F[x]:
                        count += 1
        indptr[x + 1] = count
    indices_arr = np.empty(count, dtype=np.int64)
    cdef i64[:] indices = indices_arr
    cdef i64 e = 0
    for x in range(V):
        for k in range(n):
            dk = domains[k]
            sk = strides[k]
            cur = (x // sk) % dk
            for v in range(dk):
                if v != cur:
                    y = x + (v - cur) * sk
                    if F[y] > F[x]:
                        indices[e] = y
                        e += 1
    return indptr_arr, indices_arr


def longest_path(const i64[:] order, const i64[:] indptr, const i64[:] indices):
    cdef i64 V = order.shape[0]
    length_arr = np.zeros(V, dtype=np.int64)
    pred_arr = np.full(V, -1, dtype=np.int64)
    cdef i64[:] length = length_arr
    cdef i64[:] pred = pred_arr
    cdef i64 t, x, y, e, lx
    for t in range(V):
        x = order[t]
        lx = length[x] + 1
        for e in range(indptr[x], indptr[x + 1]):
            y = indices[e]
            if lx > length[y] or (lx == length[y] and x < pred[y]):
                length[y] = lx
                pred[y] = x
    return length_arr, pred_arr


def sign_dependence_witness(const i64[:] F, i64 bit_i, i64 bit_j):
    cdef i64 V = F.shape[0]
    cdef i64 x, xj
    for x in range(V):
        if F[x ^ bit_i] > F[x]:
            xj = x ^ bit_j
            if not (F[xj ^ bit_i] > F[xj]):
                return x
    return -1
