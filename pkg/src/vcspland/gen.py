"""Generators for instance families with known local-search behaviour.

Each generator that claims a long improving path also produces that path as
an explicit schedule and checks every step is a strictly improving 1-flip.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .core import Constraint, SimpleInstance, VcspInstance, evaluate
from .errors import GeneratorError, ValidationError

SHAPES = ("tree", "path", "cycle", "random")


def quadratic_path(n: int) -> VcspInstance:
    """Path instance with table ``[[i, 0], [0, i]]`` on each edge ``{i, i+1}``.

    Variable ``n`` also carries the unary table ``(0, n)``; without it the
    fitness tops out at ``C(n, 2)`` and the leftmost-flip walk stalls at 0^n.
    """
    if n < 2:
        raise ValidationError("quadratic_path needs n >= 2", code="BAD_PARAMETER")
    cons = [Constraint((i, i + 1), (i, 0, 0, i)) for i in range(1, n)]
    cons.append(Constraint((n,), (0, n)))
    return VcspInstance.boolean(n, cons, f"quadratic_path({n})")


def quadratic_path_start(n: int) -> tuple:
    """``(10)^(n/2)``, with a trailing 1 when ``n`` is odd."""
    return tuple(1 - (k % 2) for k in range(n))


def subsetsum_star(s, t: int) -> VcspInstance:
    """Star gadget on ``n + 2`` variables whose centre is ``n + 2``.

    Variables ``n + 1`` and ``n + 2`` sign-interact exactly when some subset
    of ``s`` sums to ``t``.
    """
    s = list(s)
    if not s or any(v <= 0 for v in s) or t <= 0:
        raise ValidationError("subsetsum_star needs nonempty positive values and a positive target", code="BAD_PARAMETER")
    n = len(s)
    c = n + 2
    cons = [Constraint((i,), (0, 1)) for i in range(1, n + 2)]
    cons.append(Constraint((c,), (0, -(3 * t + 1))))
    cons += [Constraint((i, c), (0, 0, 0, 3 * si)) for i, si in enumerate(s, start=1)]
    cons.append(Constraint((n + 1, c), (0, 0, 0, 2)))
    return VcspInstance.boolean(n + 2, cons, f"subsetsum_star({s}, {t})")


def subset_sum_exists(s, t: int) -> bool:
    """Brute-force decision over all subsets."""
    return any(sum(comb) == t for r in range(len(s) + 1) for comb in itertools.combinations(s, r))


# -- domain 3 counting --------------------------------------------------------

_D3_BLOCK = (1, 2, 3, 2, 3, 1, 3, 1, 2)  # ((a + b) mod 3) + 1


def _domain3(n: int, heavy_left: bool) -> VcspInstance:
    cons = []
    for v in range(1, n + 1):
        k = n + 1 - v if heavy_left else v
        cons.append(Constraint((v, v + 1), tuple(3**k * p for p in _D3_BLOCK)))
    return VcspInstance(n + 1, (3,) * (n + 1), tuple(cons), f"domain3_counting({n})")


def domain3_schedule(n: int) -> list:
    """Count in binary from ``0^(n+1)`` to ``01^n`` using 2 as the intermediate symbol.

    Variable 1 is the most significant position. Incrementing ``y01^k``
    turns the trailing ones into 2s from left to right, sets the 0 to 1, then
    turns the 2s into 0s from right to left.
    """
    x = [0] * (n + 1)
    out = [tuple(x)]
    for _ in range(2**n - 1):
        k = 0
        while x[n - k] == 1:
            k += 1
        block = list(range(n + 1 - k, n + 1))
        for p in block:
            x[p] = 2
            out.append(tuple(x))
        x[n - k] = 1
        out.append(tuple(x))
        for p in reversed(block):
            x[p] = 0
            out.append(tuple(x))
    return out


def domain3_move_order(n: int) -> tuple:
    """Variable scan order for first-improvement: least significant position first."""
    return tuple(range(n + 1, 0, -1))


def check_schedule(instance: VcspInstance, schedule) -> str | None:
    """``None`` if every step is an improving 1-flip, else a description of the first bad step."""
    prev = None
    for t, x in enumerate(schedule, start=1):
        fx = evaluate(instance, x)
        if prev is not None:
            px, pf = prev
            if sum(a != b for a, b in zip(px, x)) != 1:
                return f"step {t - 1}->{t} is not a single flip"
            if not fx > pf:
                return f"step {t - 1}->{t} does not improve ({pf} -> {fx})"
        prev = (x, fx)
    return None


def domain3_counting(n: int, check_limit: int = 6) -> VcspInstance:
    """Path of ``n + 1`` ternary variables whose fitness graph contains a path longer than ``2^n``.

    Edge ``{v, v+1}`` carries ``3^k * P`` with ``P(a, b) = ((a + b) mod 3) + 1``.
    The weight orientation is the one under which the counting schedule
    improves at every step; for ``n <= check_limit`` the whole schedule is
    verified.
    """
    if n < 1:
        raise ValidationError("domain3_counting needs n >= 1", code="BAD_PARAMETER")
    probe = min(n, check_limit)
    for heavy_left in (True, False):
        if check_schedule(_domain3(probe, heavy_left), domain3_schedule(probe)) is None:
            return _domain3(n, heavy_left)
    raise GeneratorError("no weight orientation makes the counting schedule improving")


# -- treewidth two counting ------------------------------------------------------

# cycle states written x4 x3 x2 x1, as in the cascade description
_UP = ("0000", "1000", "1001", "1101")
_DOWN = ("1101", "0101", "0100", "0110", "0010", "0011", "0001", "0000")
CYCLE_EDGES = ((1, 2), (2, 3), (3, 4), (1, 4))
_WEIGHT_NAMES = ("c1", "c2", "c3", "c4", "e12", "e23", "e34", "e14", "link")


def _bits(state: str) -> dict:
    # "x4x3x2x1" -> {1: x1, ..., 4: x4}
    return {4 - k: int(ch) for k, ch in enumerate(state)}


def _cycle_inequalities(link_var: int):
    """Rows ``(coeffs, lower_coeff)`` meaning ``coeffs . w + lower_coeff * w_lower >= 1``.

    ``w`` is the cycle's unknown weight vector (``_WEIGHT_NAMES``) and
    ``w_lower`` the weight on the edge from the previous cycle into local
    variable 1; that neighbour rests at the old value of local variable 1.
    The input from the next block is 1 during the up sequence and 0 during the
    down sequence.
    """
    rows = []
    for seq, inp in ((_UP, 1), (_DOWN, 0)):
        for a, b in zip(seq, seq[1:]):
            xa, xb = _bits(a), _bits(b)
            (k,) = [v for v in range(1, 5) if xa[v] != xb[v]]
            sign = 1 if xb[k] == 1 else -1
            coeff = [0] * len(_WEIGHT_NAMES)
            coeff[k - 1] = sign
            for e, (p, q) in enumerate(CYCLE_EDGES):
                if k in (p, q):
                    other = q if k == p else p
                    coeff[4 + e] = sign * xa[other]
            if k == link_var:
                coeff[8] = sign * inp
            # the lower link variable is 1 in state 1101 and 0 in 0000 unless it is local variable 2
            lower = sign * xa[1] if k == 1 and link_var != 2 else 0
            rows.append((tuple(coeff), lower))
    return rows


def _solve_cycle(link_var: int, w_lower: int):
    """Integer weights with least L1 norm (then lexicographically least) meeting every row."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    rows = _cycle_inequalities(link_var)
    m = len(_WEIGHT_NAMES)
    # w = u - v with u, v >= 0; minimise sum(u + v)
    A = np.array([list(c) + [-x for x in c] for c, _ in rows], dtype=float)
    lo = np.array([1 - low * w_lower for _, low in rows], dtype=float)
    integrality = np.ones(2 * m)
    bound = 10 * (abs(w_lower) + 10)
    bounds = (np.zeros(2 * m), np.full(2 * m, bound))

    cons = [LinearConstraint(A, lo, np.inf)]
    res = milp(np.ones(2 * m), constraints=cons, integrality=integrality, bounds=Bounds(*bounds))
    if not res.success:
        return None
    best = round(res.fun)
    cons.append(LinearConstraint(np.ones((1, 2 * m)), -np.inf, best))
    # fix weights one at a time to their least feasible value
    fixed_lo, fixed_hi = bounds[0].copy(), bounds[1].copy()
    w = []
    for k in range(m):
        obj = np.zeros(2 * m)
        obj[k], obj[m + k] = 1.0, -1.0
        res = milp(obj, constraints=cons, integrality=integrality, bounds=Bounds(fixed_lo, fixed_hi))
        if not res.success:
            return None
        val = round(res.fun)
        w.append(val)
        cons.append(LinearConstraint(obj.reshape(1, -1), val, val))
    for (coeff, low) in rows:
        if sum(c * x for c, x in zip(coeff, w)) + low * w_lower < 1:
            raise GeneratorError("weight search returned a solution violating its own inequalities")
    return best, w


@dataclass(frozen=True)
class Treewidth2Family:
    instance: VcspInstance
    K: int
    link_var: int
    cycle_weights: tuple
    w: tuple
    bags: tuple
    decomposition_edges: tuple


def _cycle_vars(i: int) -> tuple:
    return tuple(4 * i + k for k in range(1, 5))


def treewidth2_family(K: int) -> Treewidth2Family:
    """Chain of ``K`` four-cycles plus a final variable ``n = 4K + 1``.

    Cycle ``i`` uses variables ``4i+1 .. 4i+4`` with cycle edges
    1-2, 2-3, 3-4, 4-1 (local numbering) and one link edge from local
    variable ``link_var`` to the next block's first variable. Weights come
    from the cascade's strict-improvement inequalities, solved block by
    block starting from ``w_0 = 0``.
    """
    if K < 1:
        raise ValidationError("treewidth2_counting needs K >= 1", code="BAD_PARAMETER")
    best = None
    for link_var in (2, 3, 4):
        sol = _solve_cycle(link_var, 0)
        if sol is not None and (best is None or sol[0] < best[1]):
            best = (link_var, sol[0])
    if best is None:
        raise GeneratorError("no link placement admits weights for the cascade")
    link_var = best[0]
    n = 4 * K + 1
    w_levels = [0]
    blocks = []
    for i in range(K):
        sol = _solve_cycle(link_var, w_levels[-1])
        if sol is None:
            raise GeneratorError(f"no weights for block {i}")
        weights = dict(zip(_WEIGHT_NAMES, sol[1]))
        blocks.append(weights)
        w_levels.append(weights["link"])
    unary, binary = {}, {}
    for i, wt in enumerate(blocks):
        vs = _cycle_vars(i)
        for k in range(4):
            if wt[f"c{k + 1}"]:
                unary[vs[k]] = wt[f"c{k + 1}"]
        for (p, q), name in zip(CYCLE_EDGES, ("e12", "e23", "e34", "e14")):
            if wt[name]:
                binary[(vs[p - 1], vs[q - 1])] = wt[name]
        if wt["link"]:
            binary[(vs[link_var - 1], 4 * (i + 1) + 1)] = wt["link"]
    simple = SimpleInstance(n, 0, unary, binary)
    cons = [c for c in simple.to_instance().constraints]
    # the final variable carries the unary table (1, -w_K)
    cons.append(Constraint((n,), (1, -w_levels[-1])))
    instance = VcspInstance.boolean(n, cons, f"treewidth2_counting({K})")
    bags, tree_edges = _decomposition(K, link_var)
    fam = Treewidth2Family(instance, K, link_var, tuple(blocks), tuple(w_levels), bags, tree_edges)
    if K <= 3:
        problem = check_schedule(instance, treewidth2_schedule(fam))
        if problem is not None:
            raise GeneratorError(f"cascade schedule fails: {problem}")
    return fam


def treewidth2_counting(K: int) -> VcspInstance:
    return treewidth2_family(K).instance


def _decomposition(K: int, link_var: int):
    """Path decomposition of width 2: two bags per cycle and one per link edge."""
    bags = []
    for i in range(K):
        a1, a2, a3, a4 = _cycle_vars(i)
        bags.append(frozenset((a1, a2, a3)))
        bags.append(frozenset((a1, a3, a4)))
        bags.append(frozenset((_cycle_vars(i)[link_var - 1], 4 * (i + 1) + 1)))
    if link_var == 2:
        # local variable 2 only sits in the first bag; carry it through the second
        bags = []
        for i in range(K):
            a1, a2, a3, a4 = _cycle_vars(i)
            bags.append(frozenset((a1, a3, a4)))
            bags.append(frozenset((a1, a2, a3)))
            bags.append(frozenset((a2, 4 * (i + 1) + 1)))
    edges = tuple((k, k + 1) for k in range(len(bags) - 1))
    return tuple(bags), edges


def is_tree_decomposition(graph: nx.Graph, bags, tree_edges) -> bool:
    """Bags cover every vertex and edge, the bag graph is a tree, and each vertex's bags are connected."""
    tree = nx.Graph()
    tree.add_nodes_from(range(len(bags)))
    tree.add_edges_from(tree_edges)
    if len(bags) == 0 or not nx.is_tree(tree):
        return False
    for v in graph.nodes:
        holders = [k for k, bag in enumerate(bags) if v in bag]
        if not holders or not nx.is_connected(tree.subgraph(holders)):
            return False
    return all(any(u in bag and v in bag for bag in bags) for u, v in graph.edges)


def decomposition_width(bags) -> int:
    return max(len(b) for b in bags) - 1


def treewidth2_schedule(fam: Treewidth2Family) -> list:
    """The cascade: blocks react to every change of their input, lowest block first."""
    n = fam.instance.n
    x = [0] * n
    x[n - 1] = 1
    out = [tuple(x)]

    def set_var(v, val):
        x[v - 1] = val
        out.append(tuple(x))

    def react(i, inp):
        # block i moves through its sequence for the given input bit
        seq = _UP if inp == 1 else _DOWN
        vs = _cycle_vars(i)
        for a, b in zip(seq, seq[1:]):
            xa, xb = _bits(a), _bits(b)
            (k,) = [v for v in range(1, 5) if xa[v] != xb[v]]
            set_var(vs[k - 1], xb[k])
            if k == 1 and i > 0:
                react(i - 1, xb[k])

    react(fam.K - 1, 1)
    set_var(n, 0)
    react(fam.K - 1, 0)
    return out


# -- random instances ----------------------------------------------------------


def _random_graph(n: int, shape: str, density: float, rng) -> list:
    labels = rng.permutation(n) + 1
    if shape == "tree":
        if n == 1:
            return []
        if n == 2:
            return [(1, 2)]
        prufer = [int(v) for v in rng.integers(0, n, size=n - 2)]
        g = nx.from_prufer_sequence(prufer)
        edges = [(int(u) + 1, int(v) + 1) for u, v in g.edges]
    elif shape == "path":
        edges = [(int(labels[k]), int(labels[k + 1])) for k in range(n - 1)]
    elif shape == "cycle":
        edges = [(int(labels[k]), int(labels[(k + 1) % n])) for k in range(n)] if n >= 3 else (
            [(1, 2)] if n == 2 else []
        )
    elif shape == "random":
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        keep = rng.random(len(pairs)) < density
        edges = [p for p, k in zip(pairs, keep) if k]
    else:
        raise ValidationError(f"unknown shape {shape!r}; expected one of {SHAPES}", code="BAD_PARAMETER")
    return sorted({(min(u, v), max(u, v)) for u, v in edges})


def _nonzero(rng, lo, hi, size):
    choices = [w for w in range(lo, hi + 1) if w != 0]
    return [int(choices[k]) for k in rng.integers(0, len(choices), size=size)]


def random_instance(
    n: int,
    shape: str = "tree",
    weight_range: tuple = (-10, 10),
    seed: int = 0,
    density: float = 0.3,
    form: str = "simple",
    domain: int = 2,
) -> VcspInstance:
    """Random binary Boolean instance on a random constraint graph.

    Graphs are drawn from a PCG64 generator seeded with ``seed``: trees via a
    uniform Prüfer sequence, paths and cycles over a random labelling, and
    ``random`` as G(n, density). With ``form="simple"`` every variable gets a
    unary weight and every edge a binary weight, each uniform over the nonzero
    integers of ``weight_range``; ``form="general"`` fills whole tables, over
    ``domain`` values per variable.
    """
    if n < 1:
        raise ValidationError("n must be positive", code="BAD_PARAMETER")
    lo, hi = weight_range
    if lo > hi or (lo == 0 and hi == 0):
        raise ValidationError("weight range must contain a nonzero integer", code="BAD_PARAMETER")
    if domain < 2 or (domain != 2 and form == "simple"):
        raise ValidationError("simple form needs domain 2; general form needs domain >= 2", code="BAD_PARAMETER")
    rng = np.random.default_rng(seed)
    edges = _random_graph(n, shape, density, rng)
    if form == "simple":
        cu = _nonzero(rng, lo, hi, n)
        cb = _nonzero(rng, lo, hi, len(edges))
        simple = SimpleInstance(n, 0, dict(zip(range(1, n + 1), cu)), dict(zip(edges, cb)))
        cons = simple.to_instance().constraints
    elif form == "general":
        cons = [Constraint((i,), tuple(_nonzero(rng, lo, hi, domain))) for i in range(1, n + 1)]
        cons += [Constraint(e, tuple(_nonzero(rng, lo, hi, domain * domain))) for e in edges]
    else:
        raise ValidationError(f"unknown form {form!r}", code="BAD_PARAMETER")
    return VcspInstance(n, (domain,) * n, tuple(cons), f"random({n},{shape},{seed})")


FAMILIES = {
    "quadratic_path": quadratic_path,
    "domain3_counting": domain3_counting,
    "treewidth2_counting": treewidth2_counting,
    "subsetsum_star": subsetsum_star,
    "random_instance": random_instance,
}
