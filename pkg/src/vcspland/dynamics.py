"""Local search traces and their analysis.

Time is 1-indexed as in the usual presentation: a trace is ``x^1 .. x^T`` and
flip ``m(t) = (i, b)`` takes ``x^t`` to ``x^{t+1}`` by setting variable ``i``
to ``b``. Gain, support and encouragement are defined for binary Boolean
instances only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import (
    VcspInstance,
    as_instance,
    check_assignment,
    constraint_graph,
    evaluate,
    format_assignment,
    require_binary_boolean,
    strides,
)
from .errors import ValidationError

DEFAULT_STEP_LIMIT = 2**20
POLICIES = ("steepest", "first", "random", "worst")
_TABLE_LIMIT = 2**20


class FitnessLookup:
    """Fast ``f(x)``: a precomputed table for small instances, cached evaluation otherwise."""

    def __init__(self, instance: VcspInstance, table: np.ndarray | None = None):
        self.instance = instance
        self.strides = strides(instance.domains)
        if table is None and instance.num_assignments <= _TABLE_LIMIT:
            table = kernels.fitness_table(instance)
        self.table = table.tolist() if table is not None else None
        self._cache = {}

    def __call__(self, x) -> int:
        if self.table is not None:
            return self.table[sum(v * s for v, s in zip(x, self.strides))]
        x = tuple(x)
        val = self._cache.get(x)
        if val is None:
            val = self._cache[x] = evaluate(self.instance, x)
        return val


@dataclass(frozen=True)
class SearchPolicy:
    kind: str = "first"
    seed: int | None = None
    step_limit: int = DEFAULT_STEP_LIMIT
    order: tuple | None = None

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise ValidationError(f"unknown policy {self.kind!r}; expected one of {POLICIES}", code="BAD_POLICY")
        if self.kind == "random" and self.seed is None:
            object.__setattr__(self, "seed", 0)


@dataclass(frozen=True, eq=False)
class Trace:
    instance: VcspInstance
    assignments: tuple
    fitness: tuple
    policy: str | None = None
    seed: int | None = None
    truncated: bool = False

    def __post_init__(self):
        xs = tuple(tuple(x) for x in self.assignments)
        if not xs:
            raise ValidationError("a trace needs at least one assignment", code="EMPTY_TRACE")
        if len(self.fitness) != len(xs):
            raise ValidationError("fitness list length differs from assignments", code="TRACE_SHAPE")
        for t in range(1, len(xs)):
            diff = [k for k, (a, b) in enumerate(zip(xs[t - 1], xs[t])) if a != b]
            if len(diff) != 1:
                raise ValidationError(f"steps {t} and {t + 1} differ in {len(diff)} positions", code="NOT_ONE_FLIP")
            if not self.fitness[t] > self.fitness[t - 1]:
                raise ValidationError(f"step {t} -> {t + 1} is not improving", code="NOT_IMPROVING")
        object.__setattr__(self, "assignments", xs)
        object.__setattr__(self, "fitness", tuple(int(f) for f in self.fitness))

    @property
    def T(self) -> int:
        return len(self.assignments)

    def __len__(self):
        return len(self.assignments)

    def x(self, t: int) -> tuple:
        return self.assignments[t - 1]

    def flip(self, t: int) -> tuple:
        """``m(t)`` as ``(variable, new value)``, 1 <= t < T."""
        if not 1 <= t < self.T:
            raise IndexError(f"flip index {t} outside 1..{self.T - 1}")
        a, b = self.assignments[t - 1], self.assignments[t]
        for k, (u, v) in enumerate(zip(a, b)):
            if u != v:
                return k + 1, v
        raise AssertionError("unreachable")

    @property
    def flips(self) -> list:
        return [self.flip(t) for t in range(1, self.T)]

    def labels(self) -> list:
        return [format_assignment(x, self.instance.domains) for x in self.assignments]

    def to_jsonl(self) -> str:
        lines = []
        for t, (x, f) in enumerate(zip(self.assignments, self.fitness), start=1):
            rec = {
                "step": t,
                "assignment": format_assignment(x, self.instance.domains),
                "fitness": f,
                "flip": format_flip(self.flip(t)) if t < self.T else None,
            }
            if t == 1:
                rec.update(policy=self.policy, seed=self.seed, truncated=self.truncated)
            lines.append(json.dumps(rec, ensure_ascii=False))
        return "\n".join(lines) + "\n"


def format_flip(flip) -> str:
    return f"({flip[0]}↦{flip[1]})"


def trace_from_jsonl(text: str, instance: VcspInstance, check_fitness: bool = True) -> Trace:
    from .core import parse_assignment

    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not records:
        raise ValidationError("trace file is empty", code="EMPTY_TRACE")
    records.sort(key=lambda r: r["step"])
    xs = [parse_assignment(r["assignment"], instance) for r in records]
    fs = [int(r["fitness"]) for r in records]
    if check_fitness:
        for t, (x, f) in enumerate(zip(xs, fs), start=1):
            if evaluate(instance, x) != f:
                raise ValidationError(f"recorded fitness at step {t} is wrong", code="TRACE_FITNESS", step=t)
    head = records[0]
    return Trace(instance, tuple(xs), tuple(fs), head.get("policy"), head.get("seed"), bool(head.get("truncated")))


def run_search(instance, start, policy: SearchPolicy | str = "first", lookup: FitnessLookup | None = None) -> Trace:
    """Follow improving 1-flip moves from ``start`` until a local optimum or the step limit.

    Candidate moves are enumerated by variable (ascending, or ``policy.order``)
    and then by new value; ``first`` takes the first improving one,
    ``steepest``/``worst`` the largest/smallest gain with ties to the earliest
    candidate, ``random`` a uniform choice from a PCG64 generator seeded with
    ``policy.seed``.
    """
    instance = as_instance(instance)
    if isinstance(policy, str):
        policy = SearchPolicy(policy)
    x = list(check_assignment(instance, start))
    f = lookup or FitnessLookup(instance)
    rng = np.random.default_rng(policy.seed) if policy.kind == "random" else None
    order = [v - 1 for v in policy.order] if policy.order else range(instance.n)
    doms = instance.domains
    xs, fs = [tuple(x)], [f(x)]
    truncated = False
    while True:
        if len(xs) > policy.step_limit:
            truncated = True
            break
        cur = fs[-1]
        moves = []
        for k in order:
            old = x[k]
            for v in range(doms[k]):
                if v == old:
                    continue
                x[k] = v
                fy = f(x)
                if fy > cur:
                    moves.append((fy, k, v))
                    if policy.kind == "first":
                        break
            x[k] = old
            if moves and policy.kind == "first":
                break
        if not moves:
            break
        if policy.kind == "first":
            choice = moves[0]
        elif policy.kind == "steepest":
            choice = max(moves, key=lambda m: m[0])
        elif policy.kind == "worst":
            choice = min(moves, key=lambda m: m[0])
        else:
            choice = moves[int(rng.integers(len(moves)))]
        fy, k, v = choice
        x[k] = v
        xs.append(tuple(x))
        fs.append(fy)
    return Trace(instance, tuple(xs), tuple(fs), policy.kind, policy.seed, truncated)


def _flipped(x, i, b):
    y = list(x)
    y[i - 1] = b
    return y


def gain(instance, x, i: int, b: int, lookup: FitnessLookup | None = None) -> int:
    """``f(x[i -> b]) - f(x[i -> 1-b])``."""
    instance = as_instance(instance)
    require_binary_boolean(instance, "gain")
    f = lookup or FitnessLookup(instance)
    return f(_flipped(x, i, b)) - f(_flipped(x, i, 1 - b))


class TraceAnalysis:
    """Support and encouragement queries over one Boolean trace."""

    def __init__(self, trace: Trace, lookup: FitnessLookup | None = None):
        require_binary_boolean(trace.instance, "trace analysis")
        self.trace = trace
        self.f = lookup or FitnessLookup(trace.instance)
        self.flips = trace.flips
        g = constraint_graph(trace.instance)
        self.adjacent = {v: set(g[v]) for v in g}

    def gain(self, x, i, b) -> int:
        return self.f(_flipped(x, i, b)) - self.f(_flipped(x, i, 1 - b))

    def supports(self, t1: int, t2: int) -> str:
        """``"strong"``, ``"weak"`` or ``"none"``: does flip ``m(t1)`` support ``m(t2)``?"""
        T = self.trace.T
        if not (1 <= t1 < T and 1 <= t2 < T):
            raise IndexError(f"flip indices must lie in 1..{T - 1}")
        if not t1 < t2:
            return "none"
        j, c = self.flips[t1 - 1]
        i, b = self.flips[t2 - 1]
        if j not in self.adjacent[i]:
            return "none"
        x1 = self.trace.x(t1)
        if not self.gain(_flipped(x1, j, c), i, b) > 0 >= self.gain(_flipped(x1, j, 1 - c), i, b):
            return "none"
        return "strong" if self.trace.x(t2)[j - 1] == c else "weak"

    def encourager(self, t: int):
        for t1 in range(t - 1, 0, -1):
            if self.supports(t1, t) == "strong":
                return t1
        return None

    def forest(self) -> "EncouragementForest":
        return EncouragementForest(
            tuple(self.encourager(t) for t in range(1, self.trace.T)), tuple(self.flips)
        )


def supports(trace: Trace, t1: int, t2: int) -> str:
    return TraceAnalysis(trace).supports(t1, t2)


@dataclass(frozen=True)
class EncouragementForest:
    """``parents[t - 1]`` is the encourager of flip ``t``, or ``None`` if courageous."""

    parents: tuple
    flips: tuple

    def __post_init__(self):
        if len(self.parents) != len(self.flips):
            raise ValidationError("parents and flips differ in length", code="FOREST_SHAPE")

    def __len__(self):
        return len(self.parents)

    def parent(self, t: int):
        return self.parents[t - 1]

    def roots(self) -> list:
        return [t for t, p in enumerate(self.parents, start=1) if p is None]

    def children(self, t: int) -> list:
        return [s for s, p in enumerate(self.parents, start=1) if p == t]

    def path_to_root(self, t: int) -> list:
        """Times from the root down to ``t``; stops early if a pointer does not go back in time."""
        path = [t]
        while True:
            p = self.parents[path[-1] - 1]
            if p is None or not 1 <= p < path[-1]:
                break
            path.append(p)
        return path[::-1]

    def chains(self) -> list:
        leaves = [t for t in range(1, len(self) + 1) if not self.children(t)]
        return [self.path_to_root(t) for t in leaves]

    def format_node(self, t: int) -> str:
        i, b = self.flips[t - 1]
        return f"({t},{i}↦{b})"

    def format_chains(self) -> list:
        return ["⊥ ⇐ " + " ⇐ ".join(self.format_node(t) for t in chain) for chain in self.chains()]

    def to_dict(self) -> dict:
        return {
            "parents": [p for p in self.parents],
            "flips": [format_flip(f) for f in self.flips],
            "chains": self.format_chains(),
        }


def encouragement_forest(trace: Trace, lookup: FitnessLookup | None = None) -> EncouragementForest:
    return TraceAnalysis(trace, lookup).forest()


@dataclass
class PropertyCheck:
    name: str
    passed: bool
    witness: dict | None = None


@dataclass
class PropertyReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name) -> PropertyCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "witness": c.witness} for c in self.checks],
        }


def verify_trace_properties(
    trace: Trace, forest: EncouragementForest | None = None, lookup: FitnessLookup | None = None
) -> PropertyReport:
    """Check the structural facts about encouragement on a concrete trace.

    Every check reports the first violating step indices as its witness.
    """
    an = TraceAnalysis(trace, lookup)
    if forest is None:
        forest = an.forest()
    flips = an.flips
    T1 = len(flips)
    report = PropertyReport()

    def add(name, witness):
        report.checks.append(PropertyCheck(name, witness is None, witness))

    # pointers go back in time and name the most recent strong support
    w = None
    for t in range(1, T1 + 1):
        p = forest.parent(t)
        if p is not None and not 1 <= p < t:
            w = {"t": t, "parent": p, "reason": "parent not earlier"}
            break
        expect = an.encourager(t)
        if p != expect:
            w = {"t": t, "parent": p, "expected": expect}
            break
    add("forest-consistent", w)

    # gain of an encouraged (or courageous) flip stays positive from just after its encourager
    w = None
    for t2 in range(1, T1 + 1):
        i, b = flips[t2 - 1]
        t1 = forest.parent(t2) or 0
        for t in range(t1 + 1, t2 + 1):
            if an.gain(trace.x(t), i, b) <= 0:
                w = {"flip": t2, "encourager": t1 or None, "t": t}
                break
        if w:
            break
    add("gain-positive-since-encourager", w)

    # only the first flip at a position can be courageous
    w = None
    first_at = {}
    for t, (i, _) in enumerate(flips, start=1):
        first_at.setdefault(i, t)
    for t in forest.roots():
        i = flips[t - 1][0]
        if first_at[i] != t:
            w = {"flip": t, "position": i, "first_flip": first_at[i]}
            break
    add("courageous-only-first", w)

    # an encouragement chain never returns to the position two steps back
    w = None
    for t3 in range(1, T1 + 1):
        t2 = forest.parent(t3)
        t1 = forest.parent(t2) if t2 else None
        if t1 and flips[t1 - 1][0] == flips[t3 - 1][0]:
            w = {"chain": [t1, t2, t3], "position": flips[t3 - 1][0]}
            break
    add("no-reversal", w)

    # one encourager never encourages two different flips at the same position
    w = None
    for t1 in range(1, T1 + 1):
        seen = {}
        for t in forest.children(t1):
            j = flips[t - 1][0]
            if j in seen:
                w = {"encourager": t1, "flips": [seen[j], t], "position": j}
                break
            seen[j] = t
        if w:
            break
    add("unique-child-per-position", w)

    # no two root-anchored chains cover the same positions in opposite order
    w = None
    seqs = {}
    for t in range(1, T1 + 1):
        seq = tuple(flips[s - 1][0] for s in forest.path_to_root(t))
        seqs.setdefault(seq, t)
    for seq, t in seqs.items():
        if len(seq) >= 2 and seq[::-1] in seqs:
            w = {"flips": [t, seqs[seq[::-1]]], "positions": list(seq)}
            break
    add("no-opposite-chains", w)

    # forest shape: at most n courageous flips
    roots = forest.roots()
    add("roots-at-most-n", None if len(roots) <= trace.instance.n else {"roots": len(roots)})
    return report
