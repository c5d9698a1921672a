"""Acceptance checks, one function per criterion.

Every check draws its random inputs from ``numpy.random.default_rng([seed, id])``
so a report depends only on the base seed. Reports never contain timings.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from math import comb

import networkx as nx
import numpy as np

from . import gen
from .core import Constraint, SimpleInstance, VcspInstance, constraint_graph, serialize
from .dynamics import (
    EncouragementForest,
    SearchPolicy,
    encouragement_forest,
    format_flip,
    run_search,
    verify_trace_properties,
)
from .graph import build_fitness_graph, fitness_table, longest_improving_path, sign_interact
from .normal import magnitude_equivalent, sign_equivalent, simplify, trim, trim_report
from .span import build_span_min_problem, minimize_span_report, solve_span_min, span, span1, span2

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    id: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "details": self.details}


def _rng(seed, cid):
    return np.random.default_rng([seed, cid])


def _simple_fields(s: SimpleInstance) -> tuple:
    return s.n, s.constant, tuple(sorted(s.unary.items())), tuple(sorted(s.binary.items()))


def _sgn(v):
    return (v > 0) - (v < 0)


def _random_general(rng, n_max=10, shapes=gen.SHAPES, n_min=2, **kw):
    n = int(rng.integers(n_min, n_max + 1))
    shape = shapes[int(rng.integers(len(shapes)))]
    form = ("simple", "general")[int(rng.integers(2))]
    return gen.random_instance(
        n, shape, seed=int(rng.integers(2**31)), density=float(rng.uniform(0.2, 0.6)), form=form, **kw
    )


# -- instance transformations used as fuzzing substrate --------------------------------


def reformulate(simple: SimpleInstance, rng, extra_pairs: int = 1) -> VcspInstance:
    """A random magnitude-equivalent instance built from general tables.

    Each binary weight is spread over a random 2x2 table with the same
    interaction term, unary tables absorb the side effects, and a few
    interaction-free tables are placed on non-edges.
    """
    n = simple.n
    unary_target = {i: simple.unary.get(i, 0) for i in range(1, n + 1)}
    constant = simple.constant
    cons = []
    pairs = dict(simple.binary)
    non_edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in pairs]
    for k in rng.permutation(len(non_edges))[:extra_pairs]:
        pairs[non_edges[int(k)]] = 0
    for (i, j), w in sorted(pairs.items()):
        a, b, c = (int(v) for v in rng.integers(-5, 6, size=3))
        d = w - a + b + c
        cons.append(Constraint((i, j), (a, b, c, d)))
        constant -= a
        unary_target[i] -= c - a
        unary_target[j] -= b - a
    for i in range(1, n + 1):
        u0 = int(rng.integers(-5, 6))
        cons.append(Constraint((i,), (u0, u0 + unary_target[i])))
        constant -= u0
    cons.append(Constraint((), (constant,)))
    return VcspInstance.boolean(n, cons, "reformulation")


def pad(simple: SimpleInstance, rng, factor: int | None = None) -> SimpleInstance:
    """Positive scaling plus one extra ``+-1`` interaction on a random pair."""
    if factor is None:
        factor = int(rng.integers(2, 5))
    scaled = simple.scaled(factor)
    n = simple.n
    binary = dict(scaled.binary)
    if n >= 2:
        i, j = sorted(int(v) for v in rng.choice(np.arange(1, n + 1), size=2, replace=False))
        binary[(i, j)] = binary.get((i, j), 0) + int(rng.choice([-1, 1]))
        binary = {e: w for e, w in binary.items() if w}
    return SimpleInstance(n, scaled.constant, scaled.unary, binary, "padded")


# -- criteria --------------------------------------------------------------------------------


def check_table_pair(seed=DEFAULT_SEED) -> CriterionResult:
    a = SimpleInstance(2, 1, {1: 1, 2: 1}).to_instance()
    b = VcspInstance.boolean(2, [Constraint((1, 2), (1, 2, 2, 3))])
    table = [int(v) for v in fitness_table(a)]
    eq = magnitude_equivalent(a, b)
    same = _simple_fields(simplify(a)) == _simple_fields(simplify(b))
    ok = table == [1, 2, 2, 3] and eq.equal and same
    return CriterionResult(
        1, "equivalent pair for table [1,2,2,3]", ok,
        {"table": table, "magnitude_equivalent": eq.equal, "identical_simple_form": same},
    )


def check_simplify(seed=DEFAULT_SEED, count=1000, reformulations=200) -> CriterionResult:
    rng = _rng(seed, 2)
    bad = None
    for k in range(count):
        inst = _random_general(rng)
        if not magnitude_equivalent(inst, simplify(inst)).equal:
            bad = {"instance": k, "name": inst.name}
            break
    containment_bad = None
    for k in range(reformulations if bad is None else 0):
        c = simplify(_random_general(rng))
        c2 = reformulate(c, rng, extra_pairs=int(rng.integers(0, 3)))
        s2 = simplify(c2)
        e2 = {tuple(sorted(e)) for e in constraint_graph(c2).edges}
        if not (set(s2.binary) <= e2 and set(c.binary) <= e2 and _simple_fields(s2) == _simple_fields(c)):
            containment_bad = {"reformulation": k}
            break
    ok = bad is None and containment_bad is None
    return CriterionResult(
        2, "simplification preserves fitness; simple edges are contained in any reformulation", ok,
        {"instances": count, "reformulations": reformulations, "failure": bad or containment_bad},
    )


def check_trim(seed=DEFAULT_SEED, count=500) -> CriterionResult:
    rng = _rng(seed, 3)
    failure = None
    removed_total = pairs_checked = 0
    for k in range(count):
        inst = _random_general(rng)
        rep = trim_report(simplify(inst))
        t = rep.instance
        removed_total += len(rep.removed)
        if not sign_equivalent(inst, t).equal:
            failure = {"instance": k, "reason": "not sign-equivalent"}
            break
        if _simple_fields(trim(t)) != _simple_fields(t):
            failure = {"instance": k, "reason": "not idempotent"}
            break
        for _ in range(2):
            p = pad(t, rng)
            if not sign_equivalent(t, p).equal:
                continue
            pairs_checked += 1
            if not set(t.binary) <= set(p.binary):
                failure = {"instance": k, "reason": "trim edges not contained in padded form"}
                break
            if any(_sgn(w) != _sgn(p.binary[e]) for e, w in t.binary.items()):
                failure = {"instance": k, "reason": "binary sign differs"}
                break
            if any(_sgn(t.weight(i)) != _sgn(p.weight(i)) for i in range(1, t.n + 1)):
                failure = {"instance": k, "reason": "unary sign differs"}
                break
        if failure:
            break
    return CriterionResult(
        3, "trimming keeps the fitness graph; signs agree across sign-equivalent forms", failure is None,
        {"instances": count, "edges_removed": removed_total, "padded_pairs_checked": pairs_checked, "failure": failure},
    )


def check_subsetsum(seed=DEFAULT_SEED, count=50) -> CriterionResult:
    rng = _rng(seed, 4)
    yes = 0
    failure = None
    for k in range(count):
        n = int(rng.integers(1, 9))
        s = [int(v) for v in rng.integers(1, 21, size=n)]
        if rng.random() < 0.5:
            mask = rng.random(n) < 0.5
            t = max(1, sum(v for v, m in zip(s, mask) if m))
        else:
            t = int(rng.integers(1, sum(s) + 3))
        expect = gen.subset_sum_exists(s, t)
        yes += expect
        got = sign_interact(gen.subsetsum_star(s, t), n + 1, n + 2)
        if got != expect:
            failure = {"values": s, "target": t, "expected": expect, "got": got}
            break
    return CriterionResult(
        4, "star gadget sign-interaction decides subset sum", failure is None,
        {"instances": count, "yes_instances": yes, "failure": failure},
    )


def check_span_bound(seed=DEFAULT_SEED, count=500) -> CriterionResult:
    rng = _rng(seed, 5)
    failure = None
    tight = 0
    for k in range(count):
        domain = (2, 2, 3, 4)[k % 4]
        n_max = {2: 12, 3: 7, 4: 6}[domain]
        n = int(rng.integers(2, n_max + 1))
        form = "simple" if domain == 2 and k % 8 == 0 else "general"
        shape = gen.SHAPES[int(rng.integers(len(gen.SHAPES)))]
        inst = gen.random_instance(n, shape, seed=int(rng.integers(2**31)), form=form, domain=domain, density=0.4)
        length, _ = longest_improving_path(build_fitness_graph(inst))
        s = span(inst)
        tight += length == s
        if length > s:
            failure = {"instance": k, "name": inst.name, "longest": length, "span": s}
            break
    return CriterionResult(
        5, "longest improving path is at most the span", failure is None,
        {"instances": count, "tight": tight, "failure": failure},
    )


def check_span_factor(seed=DEFAULT_SEED, count=500) -> CriterionResult:
    xor = VcspInstance.boolean(2, [Constraint((1, 2), (0, 1, 1, 0))])
    xs = simplify(xor)
    example = (span(xor), span(xs))
    rng = _rng(seed, 6)
    failure = None
    worst = 0.0
    for k in range(count):
        inst = _random_general(rng)
        s0 = span(inst)
        simple = simplify(inst)
        t = span(trim(simple))
        if s0:
            worst = max(worst, t / s0)
        if t > 4 * s0 or span1(simple) > 2 * s0 or span2(simple) > 2 * span2(inst):
            failure = {"instance": k, "name": inst.name, "span": s0, "trimmed": t}
            break
    ok = example == (1, 4) and failure is None
    return CriterionResult(
        6, "simple trim form costs at most a factor of four in span", ok,
        {"xor_span": example[0], "xor_simple_span": example[1], "instances": count,
         "worst_ratio": round(worst, 6), "failure": failure},
    )


def check_minspan(seed=DEFAULT_SEED, count=100) -> CriterionResult:
    unary_ok = True
    for n in range(1, 9):
        inst = SimpleInstance(n, 0, {i: 2**i for i in range(1, n + 1)})
        if minimize_span_report(inst).minimized_span != n:
            unary_ok = False
    ex53 = build_span_min_problem(SimpleInstance(2, 0, {1: 1, 2: 1}, {(1, 2): -2}))
    sol = solve_span_min(ex53)
    rng = _rng(seed, 7)
    failure = None
    saved = 0
    for k in range(count):
        inst = _random_general(rng)
        rep = minimize_span_report(inst)
        if not sign_equivalent(inst, rep.instance).equal:
            failure = {"instance": k, "reason": "not sign-equivalent"}
            break
        if rep.minimized_span > rep.trimmed_span:
            failure = {"instance": k, "reason": "objective above trimmed span"}
            break
        saved += rep.trimmed_span - rep.minimized_span
    ok = unary_ok and sol.objective == 4 and failure is None
    return CriterionResult(
        7, "span minimisation is exact and keeps the fitness graph", ok,
        {"unary_minimize_to_n": unary_ok, "xor_problem_optimum": sol.objective, "instances": count,
         "total_span_saved": saved, "failure": failure},
    )


def check_degree2_envelope(seed=DEFAULT_SEED, count=200) -> CriterionResult:
    rng = _rng(seed, 8)
    failure = None
    worst = 0.0
    for k in range(count):
        inst = _random_general(rng, shapes=("path", "cycle"), n_min=3)
        n = inst.n
        m = minimize_span_report(inst).minimized_span
        worst = max(worst, m / (n * (n + 1)))
        if m > n * (n + 1):
            failure = {"instance": k, "name": inst.name, "minimized_span": m}
            break
    return CriterionResult(
        8, "paths and cycles minimise to span at most n(n+1)", failure is None,
        {"instances": count, "worst_ratio": round(worst, 6), "failure": failure},
    )


def check_tree_bound(seed=DEFAULT_SEED, count=1000) -> CriterionResult:
    rng = _rng(seed, 9)
    failure = None
    attained = 0
    for k in range(count):
        inst = _random_general(rng, n_max=12, shapes=("tree",))
        n = inst.n
        length, _ = longest_improving_path(build_fitness_graph(inst))
        attained += length == comb(n, 2) + n
        if length > comb(n, 2) + n:
            failure = {"instance": k, "name": inst.name, "longest": length}
            break
    quad = {n: longest_improving_path(build_fitness_graph(gen.quadratic_path(n)))[0] for n in range(2, 13)}
    exact = all(v == comb(n, 2) + n for n, v in quad.items())
    return CriterionResult(
        9, "trees have improving paths of length at most C(n,2)+n", failure is None and exact,
        {"instances": count, "random_trees_at_bound": attained, "quadratic_path": quad, "failure": failure},
    )


WALK_PATH = "1010 -> 0010 -> 0110 -> 1110 -> 1100 -> 1000 -> 0000 -> 0001 -> 0011 -> 0111 -> 1111"
WALK_FLIPS = "1↦0, 2↦1, 1↦1, 3↦0, 2↦0, 1↦0, 4↦1, 3↦1, 2↦1, 1↦1"
WALK_CHAINS = (
    "⊥ ⇐ (1,1↦0)",
    "⊥ ⇐ (2,2↦1) ⇐ (3,1↦1)",
    "⊥ ⇐ (4,3↦0) ⇐ (5,2↦0) ⇐ (6,1↦0)",
    "⊥ ⇐ (7,4↦1) ⇐ (8,3↦1) ⇐ (9,2↦1) ⇐ (10,1↦1)",
)


def quadratic_trace():
    return run_search(gen.quadratic_path(4), (1, 0, 1, 0), "first")


def check_quadratic_walk(seed=DEFAULT_SEED) -> CriterionResult:
    tr = quadratic_trace()
    path = " -> ".join(tr.labels())
    flips = ", ".join(format_flip(f).strip("()") for f in tr.flips)
    chains = tuple(encouragement_forest(tr).format_chains())
    fitness_ok = list(tr.fitness) == list(range(11))
    ok = path == WALK_PATH and flips == WALK_FLIPS and chains == WALK_CHAINS and fitness_ok
    return CriterionResult(
        10, "leftmost-first walk on the quadratic path", ok,
        {"path": path, "flips": flips, "chains": list(chains), "fitness_steps_by_one": fitness_ok},
    )


def _corrupt(forest: EncouragementForest, t: int, parent) -> EncouragementForest:
    parents = list(forest.parents)
    parents[t - 1] = parent
    return EncouragementForest(tuple(parents), forest.flips)


def check_trace_properties(seed=DEFAULT_SEED, count=10000) -> CriterionResult:
    rng = _rng(seed, 11)
    failures = {}
    examples = {}
    policies = ("random", "first", "steepest", "worst")
    for k in range(count):
        inst = _random_general(rng, shapes=("tree",))
        start = tuple(int(v) for v in rng.integers(0, 2, inst.n))
        kind = policies[k % 4]
        order = tuple(int(v) + 1 for v in rng.permutation(inst.n)) if kind != "random" else None
        tr = run_search(inst, start, SearchPolicy(kind, seed=k, order=order))
        for c in verify_trace_properties(tr).checks:
            if not c.passed:
                failures[c.name] = failures.get(c.name, 0) + 1
                examples.setdefault(c.name, {
                    "trace": k, "instance": json.loads(serialize(inst)),
                    "assignments": tr.labels(), "witness": c.witness,
                })
    # negative controls on the quadratic-path walk
    tr = quadratic_trace()
    forest = encouragement_forest(tr)
    controls = {
        "encouraged flip marked courageous": verify_trace_properties(tr, _corrupt(forest, 10, None)),
        "parent is a non-supporting step": verify_trace_properties(tr, _corrupt(forest, 10, 4)),
    }
    control_out = {name: [c.name for c in rep.failed()] for name, rep in controls.items()}
    controls_ok = all(
        "gain-positive-since-encourager" in names or "forest-consistent" in names for names in control_out.values()
    ) and "gain-positive-since-encourager" in control_out["encouraged flip marked courageous"]
    ok = not failures and controls_ok
    return CriterionResult(
        11, "encouragement properties on random tree traces", ok,
        {"traces": count, "failing_traces_by_property": dict(sorted(failures.items())),
         "first_counterexamples": dict(sorted(examples.items())),
         "negative_controls_fail": controls_ok, "negative_control_failures": control_out},
    )


def check_domain3(seed=DEFAULT_SEED) -> CriterionResult:
    inst = gen.domain3_counting(6)
    length, _ = longest_improving_path(build_fitness_graph(inst))
    small = gen.domain3_counting(4)
    tr = run_search(small, (0,) * 5, SearchPolicy("first", order=gen.domain3_move_order(4)))
    ok = length >= 2**6 and tr.T - 1 > 2**4
    return CriterionResult(
        12, "ternary path counter has an exponentially long improving path", ok,
        {"n": 6, "vertices": inst.num_assignments, "longest_path": length,
         "schedule_length": len(gen.domain3_schedule(6)) - 1, "first_improvement_n4_steps": tr.T - 1},
    )


def check_treewidth2(seed=DEFAULT_SEED) -> CriterionResult:
    fam = gen.treewidth2_family(3)
    inst = fam.instance
    g = constraint_graph(inst)
    max_deg = max(d for _, d in g.degree)
    decomp_ok = gen.is_tree_decomposition(g, fam.bags, fam.decomposition_edges)
    width = gen.decomposition_width(fam.bags)
    length, _ = longest_improving_path(build_fitness_graph(inst))
    sched = gen.treewidth2_schedule(fam)
    drops = sum(1 for a, b in zip(sched, sched[1:]) if a[0] == 1 and b[0] == 0)
    ok = (max_deg <= 3 and decomp_ok and width <= 2 and length >= 2**3 and drops >= 2**3
          and gen.check_schedule(inst, sched) is None)
    return CriterionResult(
        13, "treewidth-two Boolean cascade", ok,
        {"K": 3, "variables": inst.n, "max_degree": max_deg, "decomposition_valid": decomp_ok,
         "decomposition_width": width, "cyclic": not nx.is_forest(g), "longest_path": length,
         "cascade_steps": len(sched) - 1, "variable_1_drops": drops, "link_weights": list(fam.w)},
    )


def check_determinism(seed=DEFAULT_SEED) -> CriterionResult:
    """In-process replay of seeded pipelines; the CLI-level byte comparison lives in the test suite."""

    def run():
        rng = _rng(seed, 14)
        parts = []
        for k in range(20):
            inst = _random_general(rng)
            tr = run_search(inst, (0,) * inst.n, SearchPolicy("random", seed=k))
            parts.append(serialize(inst) + tr.to_jsonl())
            parts.append(json.dumps(minimize_span_report(inst).to_dict(), sort_keys=True))
        return hashlib.sha256("".join(parts).encode()).hexdigest()

    a, b = run(), run()
    return CriterionResult(14, "seeded runs are reproducible", a == b, {"digest": a, "replay_digest": b})


CRITERIA = (
    check_table_pair,
    check_simplify,
    check_trim,
    check_subsetsum,
    check_span_bound,
    check_span_factor,
    check_minspan,
    check_degree2_envelope,
    check_tree_bound,
    check_quadratic_walk,
    check_trace_properties,
    check_domain3,
    check_treewidth2,
    check_determinism,
)


def run_all(seed: int = DEFAULT_SEED, only=None) -> dict:
    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        if only and k not in only:
            continue
        results.append(fn(seed).to_dict())
    return {"seed": seed, "passed": all(r["passed"] for r in results), "criteria": results}
