"""Pure numpy/Python kernels. Same signatures and results as ``_ckernels``."""

import numpy as np

NAME = "python"


def fitness_table(domains, strides, scope_ptr, scope_vars, table_ptr, table_vals):
    V = int(np.prod(domains, dtype=np.int64)) if len(domains) else 1
    codes = np.arange(V, dtype=np.int64)
    digits = [(codes // s) % d for s, d in zip(strides, domains)]
    F = np.zeros(V, dtype=np.int64)
    for c in range(len(scope_ptr) - 1):
        idx = np.zeros(V, dtype=np.int64)
        for p in range(scope_ptr[c], scope_ptr[c + 1]):
            var = scope_vars[p]
            idx *= domains[var]
            idx += digits[var]
        F += table_vals[table_ptr[c] : table_ptr[c + 1]][idx]
    return F


def improving_edges(F, domains, strides):
    V = len(F)
    codes = np.arange(V, dtype=np.int64)
    srcs, dsts = [], []
    for k, (d, s) in enumerate(zip(domains, strides)):
        digit = (codes // s) % d
        for v in range(d):
            tgt = codes + (v - digit) * s
            mask = (digit != v) & (F[tgt] > F)
            srcs.append(codes[mask])
            dsts.append(tgt[mask])
    if srcs:
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
    # stable sort keeps (variable, value) order within each source
    order = np.argsort(src, kind="stable")
    indices = dst[order].astype(np.int64)
    counts = np.bincount(src, minlength=V)
    indptr = np.zeros(V + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


def longest_path(order, indptr, indices):
    V = len(order)
    length = [0] * V
    pred = [-1] * V
    ip = indptr.tolist()
    ix = indices.tolist()
    for x in order.tolist():
        lx = length[x] + 1
        for e in range(ip[x], ip[x + 1]):
            y = ix[e]
            ly = length[y]
            if lx > ly or (lx == ly and x < pred[y]):
                length[y] = lx
                pred[y] = x
    return np.asarray(length, dtype=np.int64), np.asarray(pred, dtype=np.int64)


def sign_dependence_witness(F, bit_i, bit_j):
    codes = np.arange(len(F), dtype=np.int64)
    xi = codes ^ bit_i
    xj = codes ^ bit_j
    mask = (F[xi] > F) & ~(F[xj ^ bit_i] > F[xj])
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else -1
