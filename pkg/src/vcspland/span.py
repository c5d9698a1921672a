"""Span of an instance and exact span minimisation over sign-equivalent simple instances.

For a simple trim instance every sign-equivalent simple instance keeps the
sign of every weight, so only magnitudes are free. Each variable ``i`` and
each subset ``Y`` of its incident edges fixes the sign of the gain
``c_i + sum_{e in Y} c_e``; rewriting those signs over the magnitudes gives
linear side constraints ``k + sum(L) <= sum(R)`` (or ``=``). The solver below
finds the minimum total magnitude exactly with integer branch and bound.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .core import SimpleInstance, as_instance, require_binary_boolean
from .errors import InfeasibleError, ValidationError
from .graph import DEFAULT_MAX_VERTICES
from .normal import sign_equivalent, simplify, trim

MAX_DEGREE = 20
_DUAL_SCALE = 2**20  # denominator used when rounding LP multipliers to exact integers
_ELASTIC = 2**20  # penalty on slack columns; keeps every node LP feasible


def span(instance) -> int:
    """Sum over constraints of (max value - min value)."""
    return sum(c.span() for c in as_instance(instance).constraints)


def span_by_arity(instance) -> dict:
    out = defaultdict(int)
    for c in as_instance(instance).constraints:
        out[c.arity] += c.span()
    return dict(out)


def span1(instance) -> int:
    return span_by_arity(instance).get(1, 0)


def span2(instance) -> int:
    return span_by_arity(instance).get(2, 0)


def var_label(key) -> str:
    return "p_%s" % (key[0] if len(key) == 1 else "{%d,%d}" % key)


@dataclass(frozen=True)
class LinearSideConstraint:
    """``offset + sum(left) <= sum(right)``, or ``==`` when ``kind == "eq"``."""

    kind: str
    offset: int
    left: tuple
    right: tuple

    def satisfied(self, a) -> bool:
        lhs = self.offset + sum(a[v] for v in self.left)
        rhs = sum(a[v] for v in self.right)
        return lhs == rhs if self.kind == "eq" else lhs <= rhs

    def __str__(self):
        op = "=" if self.kind == "eq" else "≤"
        side = lambda vs: "{" + ", ".join(var_label(v) for v in vs) + "}"
        return f"{op}_+{self.offset}[{side(self.left)}, {side(self.right)}]"


@dataclass(frozen=True)
class SpanMinProblem:
    variables: tuple
    positive: frozenset
    constraints: tuple
    source: dict = field(default_factory=dict)

    @property
    def negative(self) -> frozenset:
        return frozenset(self.variables) - self.positive

    def feasible(self, a) -> bool:
        return all(a[v] >= 0 for v in self.variables) and all(c.satisfied(a) for c in self.constraints)

    def objective(self, a) -> int:
        return sum(a[v] for v in self.variables)

    def absolute_solution(self) -> dict:
        return {v: abs(self.source[v]) for v in self.variables}


def build_span_min_problem(instance: SimpleInstance, max_degree: int = MAX_DEGREE) -> SpanMinProblem:
    if not isinstance(instance, SimpleInstance):
        raise ValidationError("span minimisation needs a SimpleInstance", code="NOT_SIMPLE")
    source = {}
    for i, w in instance.unary.items():
        source[(i,)] = w
    for e, w in instance.binary.items():
        source[e] = w
    variables = tuple(sorted(source, key=lambda k: (len(k), k)))
    positive = frozenset(v for v in variables if source[v] > 0)
    incident = defaultdict(list)
    for e in instance.binary:
        incident[e[0]].append(e)
        incident[e[1]].append(e)
    constraints = []
    for i in range(1, instance.n + 1):
        edges = incident[i]
        if len(edges) > max_degree:
            raise ValidationError(
                f"variable {i} has degree {len(edges)} > {max_degree}", code="DEGREE_LIMIT", variable=i
            )
        ci = instance.unary.get(i, 0)
        for mask in range(1 << len(edges)):
            Y = [e for b, e in enumerate(edges) if mask >> b & 1]
            s = ci + sum(instance.binary[e] for e in Y)
            vs = Y + ([(i,)] if ci else [])
            pos = tuple(sorted((v for v in vs if v in positive), key=lambda k: (len(k), k)))
            neg = tuple(sorted((v for v in vs if v not in positive), key=lambda k: (len(k), k)))
            if s < 0:
                constraints.append(LinearSideConstraint("le", 1, pos, neg))
            elif s > 0:
                constraints.append(LinearSideConstraint("le", 1, neg, pos))
            elif pos or neg:
                constraints.append(LinearSideConstraint("eq", 0, pos, neg))
    return SpanMinProblem(variables, positive, tuple(constraints), source)


@dataclass
class SolveResult:
    assignment: dict
    objective: int
    nodes: int
    constraints_used: int


class _Search:
    """Depth-first branch and bound with bounds-consistency propagation.

    Nodes are also pruned by a Lagrangian bound. A floating-point LP only
    proposes the multipliers; the bound itself is evaluated in integers and
    is valid for any non-negative multipliers, so rounding never affects the
    result.
    """

    def __init__(self, problem: SpanMinProblem):
        self.vars = list(problem.variables)
        index = {v: k for k, v in enumerate(self.vars)}
        unique = {}
        for c in problem.constraints:
            key = (c.kind, c.offset, tuple(sorted(index[v] for v in c.left)), tuple(sorted(index[v] for v in c.right)))
            unique[key] = None
        self.cons = list(unique)
        self.watch = [[] for _ in self.vars]
        for ci, (_, _, L, R) in enumerate(self.cons):
            for v in set(L) | set(R):
                self.watch[v].append(ci)
        self.nodes = 0
        # every constraint as rows a.p >= k (an equality gives two rows)
        rows, rhs = [], []
        for kind, k, L, R in self.cons:
            a = [0] * len(self.vars)
            for v in R:
                a[v] += 1
            for v in L:
                a[v] -= 1
            rows.append(a)
            rhs.append(k)
            if kind == "eq":
                rows.append([-c for c in a])
                rhs.append(-k)
        self.A = np.array(rows, dtype=np.int64).reshape(len(rows), len(self.vars))
        self.k = np.array(rhs, dtype=np.int64)

    def lower_bound(self, lb, ub) -> tuple:
        """Integer lower bound on the objective over the box ``[lb, ub]``.

        Also returns the LP point rounded to integers when it is integral and
        exactly feasible, else ``None``.
        """
        m, r = len(self.vars), len(self.k)
        if r == 0:
            return sum(lb), list(lb)
        res = linprog(
            np.concatenate([np.ones(m), np.full(r, float(_ELASTIC))]),
            A_ub=-np.hstack([self.A, np.eye(r)]),
            b_ub=-self.k.astype(float),
            bounds=list(zip(lb, ub)) + [(0, None)] * r,
            method="highs",
        )
        if res.status != 0:
            return sum(lb), None
        y = np.rint(np.clip(-res.ineqlin.marginals, 0, _ELASTIC) * _DUAL_SCALE).astype(np.int64)
        # sum(p) = y.(A p) + red.p >= y.k + sum(min(red_v lb_v, red_v ub_v)), all scaled by _DUAL_SCALE
        red = [_DUAL_SCALE - int(v) for v in self.A.T @ y]
        total = int(y @ self.k) + sum(c * (lb[v] if c >= 0 else ub[v]) for v, c in enumerate(red))
        bound = max(sum(lb), -(-total // _DUAL_SCALE))
        point = [int(v) for v in np.rint(res.x[:m])]
        if np.abs(res.x[:m] - point).max() > 1e-6 or not self.satisfied(point, float("inf"), 0):
            point = None
        return bound, point

    def satisfied(self, vals, cap, floor) -> bool:
        if not floor <= sum(vals) <= cap:
            return False
        for kind, k, L, R in self.cons:
            lhs = k + sum(vals[v] for v in L)
            rhs = sum(vals[v] for v in R)
            if lhs > rhs or (kind == "eq" and lhs != rhs):
                return False
        return True

    def propagate(self, lb, ub, cap, floor=0, touched=None) -> bool:
        """Tighten bounds in place; ``cap``/``floor`` bound the objective.

        ``touched`` limits the initial worklist to constraints on those variables.
        """
        m = len(self.vars)
        if touched is None:
            queue = list(range(len(self.cons)))
        else:
            queue = sorted({c for v in touched for c in self.watch[v]})
        queued = [False] * len(self.cons)
        for c in queue:
            queued[c] = True
        check_obj = True
        while queue or check_obj:
            if check_obj:
                check_obj = False
                slb, sub = sum(lb), sum(ub)
                if slb > cap or sub < floor:
                    return False
                for v in range(m):
                    nu = cap - (slb - lb[v])
                    nl = floor - (sub - ub[v])
                    if nu < ub[v] or nl > lb[v]:
                        if nu < ub[v]:
                            sub -= ub[v] - nu
                            ub[v] = nu
                        if nl > lb[v]:
                            slb += nl - lb[v]
                            lb[v] = nl
                        if lb[v] > ub[v]:
                            return False
                        for c in self.watch[v]:
                            if not queued[c]:
                                queued[c] = True
                                queue.append(c)
            while queue:
                ci = queue.pop()
                queued[ci] = False
                kind, k, L, R = self.cons[ci]
                lbL = sum(lb[v] for v in L)
                ubR = sum(ub[v] for v in R)
                changed = []
                # k + sum(L) <= sum(R)
                for v in L:
                    nu = ubR - k - (lbL - lb[v])
                    if nu < ub[v]:
                        ub[v] = nu
                        changed.append(v)
                for v in R:
                    nl = k + lbL - (ubR - ub[v])
                    if nl > lb[v]:
                        lb[v] = nl
                        changed.append(v)
                if kind == "eq":
                    ubL = sum(ub[v] for v in L)
                    lbR = sum(lb[v] for v in R)
                    for v in R:
                        nu = k + ubL - (lbR - lb[v])
                        if nu < ub[v]:
                            ub[v] = nu
                            changed.append(v)
                    lbR = sum(lb[v] for v in R)
                    for v in L:
                        nl = lbR - k - (ubL - ub[v])
                        if nl > lb[v]:
                            lb[v] = nl
                            changed.append(v)
                for v in changed:
                    if lb[v] > ub[v]:
                        return False
                    check_obj = True
                    for c in self.watch[v]:
                        if c != ci and not queued[c]:
                            queued[c] = True
                            queue.append(c)
                if changed and not queued[ci]:
                    queued[ci] = True
                    queue.append(ci)
        return True

    def dfs(self, lb, ub, order, cap, floor, first_only):
        """Yield-free DFS; returns the best (objective, values) found under ``cap``."""
        best = None
        stack = [(lb, ub, None)]
        while stack:
            lb, ub, touched = stack.pop()
            self.nodes += 1
            if best is not None and not first_only:
                cap = min(cap, best[0] - 1)
            if not self.propagate(lb, ub, cap, floor, touched):
                continue
            if any(l < u for l, u in zip(lb, ub)):
                bound, point = self.lower_bound(lb, ub)
                if bound > cap:
                    continue
                if point is not None and not first_only and all(l <= v <= u for l, v, u in zip(lb, point, ub)):
                    obj = sum(point)
                    if obj <= cap and (best is None or obj < best[0]):
                        best = (obj, point)
                    if obj == bound:
                        continue
            free = next((v for v in order if lb[v] < ub[v]), None)
            if free is None:
                if not self.satisfied(lb, cap, floor):
                    continue
                obj = sum(lb)
                if best is None or obj < best[0]:
                    best = (obj, list(lb))
                    if first_only:
                        return best
                continue
            # branch on free == lb (explored first) versus free > lb
            hlb = list(lb)
            hlb[free] += 1
            stack.append((hlb, list(ub), (free,)))
            ub = list(ub)
            ub[free] = lb[free]
            stack.append((list(lb), ub, (free,)))
        return best


def solve_span_min(problem: SpanMinProblem, max_objective: int = 2**16) -> SolveResult:
    """Exact minimum of the total magnitude, and the lexicographically least optimal assignment.

    Problems built from an instance start from the feasible absolute-weight
    assignment. Hand-built problems without source weights first search for
    any solution with objective at most 1, 2, 4, ... ``max_objective``.
    """
    search = _Search(problem)
    m = len(search.vars)
    if m == 0:
        if not problem.feasible({}):
            raise InfeasibleError("constraints without variables are violated")
        return SolveResult({}, 0, 0, len(search.cons))
    if problem.source:
        start = problem.absolute_solution()
        if not problem.feasible(start):
            raise InfeasibleError("the absolute-weight assignment violates the side constraints")
        upper = problem.objective(start)
    else:
        upper, cap = None, 1
        while upper is None and cap <= max_objective:
            found = search.dfs([0] * m, [cap] * m, list(range(m)), cap, 0, first_only=True)
            if found is not None:
                upper = found[0]
            cap *= 2
        if upper is None:
            raise InfeasibleError(f"no solution with objective <= {max_objective}")

    degree = [len(w) for w in search.watch]
    order = sorted(range(m), key=lambda v: (-degree[v], v))
    found = search.dfs([0] * m, [upper] * m, order, upper - 1, 0, first_only=False)
    optimum = upper if found is None else found[0]
    # canonical witness: least assignment in variable order among optimal ones
    canon = search.dfs([0] * m, [optimum] * m, list(range(m)), optimum, optimum, first_only=True)
    if canon is None:
        raise InfeasibleError("no assignment reaches the optimum found")
    values = dict(zip(search.vars, canon[1]))
    return SolveResult(values, optimum, search.nodes, len(search.cons))


@dataclass
class MinimizeReport:
    original_span: int
    simple_span: int
    trimmed_span: int
    minimized_span: int
    instance: SimpleInstance
    weights: dict
    nodes: int
    side_constraints: int

    def to_dict(self) -> dict:
        return {
            "original_span": self.original_span,
            "simple_span": self.simple_span,
            "trimmed_span": self.trimmed_span,
            "minimized_span": self.minimized_span,
            "weights": {"c" + var_label(k)[1:]: w for k, w in self.weights.items()},
            "solver": {"nodes": self.nodes, "side_constraints": self.side_constraints},
        }


def minimize_span_report(instance, max_vertices: int | None = None, verify: bool = True) -> MinimizeReport:
    inst = as_instance(instance)
    require_binary_boolean(inst, "span minimisation")
    simple = simplify(inst)
    trimmed = trim(simple, max_vertices)
    problem = build_span_min_problem(trimmed)
    result = solve_span_min(problem)
    unary, binary = {}, {}
    for key, p in result.assignment.items():
        if p == 0:
            continue
        w = p if problem.source[key] > 0 else -p
        if len(key) == 1:
            unary[key[0]] = w
        else:
            binary[key] = w
    out = SimpleInstance(inst.n, simple.constant, unary, binary, inst.name)
    limit = DEFAULT_MAX_VERTICES if max_vertices is None else max_vertices
    if verify and inst.num_assignments <= limit:
        rep = sign_equivalent(inst, out, max_vertices)
        if not rep.equal:
            raise AssertionError(f"minimized instance is not sign-equivalent: {rep.first_divergence}")
    weights = {k: (unary[k[0]] if len(k) == 1 else binary[k]) for k in problem.variables if result.assignment[k]}
    return MinimizeReport(
        span(inst), span(simple), span(trimmed), span(out), out, weights, result.nodes, result.constraints_used
    )


def minimize_span(instance, max_vertices: int | None = None) -> SimpleInstance:
    return minimize_span_report(instance, max_vertices).instance
