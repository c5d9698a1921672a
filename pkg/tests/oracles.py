"""Slow, obviously-correct reference implementations used as test oracles."""

from __future__ import annotations

import itertools
from functools import lru_cache


def naive_evaluate(instance, x):
    """Sum of table lookups, indexing each table by walking its scope tuple."""
    total = 0
    for c in instance.constraints:
        idx = 0
        for v in c.scope:
            idx = idx * instance.domains[v - 1] + x[v - 1]
        total += c.values[idx]
    return total


def all_assignments(domains):
    return list(itertools.product(*(range(d) for d in domains)))


def naive_edges(instance):
    """Set of improving 1-flip moves as pairs of assignment tuples."""
    f = {x: naive_evaluate(instance, x) for x in all_assignments(instance.domains)}
    edges = set()
    for x, fx in f.items():
        for k, d in enumerate(instance.domains):
            for v in range(d):
                if v != x[k]:
                    y = x[:k] + (v,) + x[k + 1 :]
                    if f[y] > fx:
                        edges.add((x, y))
    return edges


def dfs_longest_path(instance) -> int:
    """Longest improving path by memoised DFS from every vertex."""
    succ = {}
    for x, y in naive_edges(instance):
        succ.setdefault(x, []).append(y)

    @lru_cache(maxsize=None)
    def longest_from(x):
        return max((1 + longest_from(y) for y in succ.get(x, ())), default=0)

    return max(longest_from(x) for x in all_assignments(instance.domains))


def naive_sign_depends(instance, i, j) -> bool:
    """Search for x where flipping j changes whether flipping i improves."""
    doms = instance.domains
    for x in all_assignments(doms):
        xi = list(x)
        xi[i - 1] ^= 1
        xj = list(x)
        xj[j - 1] ^= 1
        xij = list(xj)
        xij[i - 1] ^= 1
        before = naive_evaluate(instance, xi) > naive_evaluate(instance, x)
        after = naive_evaluate(instance, xij) > naive_evaluate(instance, xj)
        if before != after:
            return True
    return False


def _points(m, budget):
    if m == 0:
        yield ()
        return
    for v in range(budget + 1):
        for rest in _points(m - 1, budget - v):
            yield (v,) + rest


def brute_force_span_min(problem, budget: int):
    """Least objective over nonnegative integer points with coordinate sum at most ``budget``."""
    best = None
    for vals in _points(len(problem.variables), budget):
        obj = sum(vals)
        if best is not None and obj >= best:
            continue
        if problem.feasible(dict(zip(problem.variables, vals))):
            best = obj
    return best


def smallest_sign_equivalent_span(instance, budget: int, sign_equivalent):
    """Least total absolute weight of any simple instance with the same fitness graph.

    Enumerates every weight vector over all unary and binary positions, so it
    does not rely on any side-constraint model.
    """
    from vcspland.core import SimpleInstance

    n = instance.n
    keys = [(i,) for i in range(1, n + 1)] + list(itertools.combinations(range(1, n + 1), 2))
    best = None
    for mags in _points(len(keys), budget):
        total = sum(mags)
        if best is not None and total >= best:
            continue
        nz = [k for k, m in zip(keys, mags) if m]
        for signs in itertools.product((1, -1), repeat=len(nz)):
            w = dict(zip(nz, (s * m for s, m in zip(signs, (m for m in mags if m)))))
            cand = SimpleInstance(
                n, 0, {k[0]: v for k, v in w.items() if len(k) == 1}, {k: v for k, v in w.items() if len(k) == 2}
            )
            if sign_equivalent(instance, cand):
                best = total
                break
    return best


def naive_gain(instance, x, i, b):
    hi = list(x)
    hi[i - 1] = b
    lo = list(x)
    lo[i - 1] = 1 - b
    return naive_evaluate(instance, hi) - naive_evaluate(instance, lo)
