"""Normal forms for binary Boolean instances.

``simplify`` gives the unique simple instance implementing the same fitness
function. ``trim`` then drops every binary weight whose endpoints do not
sign-interact, which keeps the fitness graph unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SimpleInstance, VcspInstance, as_instance, decode, require_binary_boolean, strides
from .errors import ValidationError
from .graph import fitness_table, sign_depends


@dataclass(frozen=True)
class EquivalenceReport:
    kind: str
    equal: bool
    first_divergence: tuple | None = None

    def __post_init__(self):
        if self.equal != (self.first_divergence is None):
            raise ValueError("equal must hold exactly when no divergence is recorded")

    def __bool__(self):
        return self.equal


@dataclass(frozen=True)
class TrimReport:
    instance: SimpleInstance
    removed: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)


def simplify(instance) -> SimpleInstance:
    """Expand every constraint as a multilinear polynomial and collect monomials."""
    if isinstance(instance, SimpleInstance):
        return instance
    require_binary_boolean(instance, "simplify")
    const = 0
    unary = {}
    binary = {}
    for c in instance.constraints:
        v = c.values
        if c.arity == 0:
            const += v[0]
        elif c.arity == 1:
            (i,) = c.scope
            const += v[0]
            unary[i] = unary.get(i, 0) + v[1] - v[0]
        else:
            i, j = c.scope
            v00, v01, v10, v11 = v
            const += v00
            unary[i] = unary.get(i, 0) + v10 - v00
            unary[j] = unary.get(j, 0) + v01 - v00
            binary[(i, j)] = v00 - v01 - v10 + v11
    return SimpleInstance(
        instance.n,
        const,
        {i: w for i, w in unary.items() if w},
        {e: w for e, w in binary.items() if w},
        instance.name,
    )


def _same_shape(a: VcspInstance, b: VcspInstance):
    if a.n != b.n or a.domains != b.domains:
        raise ValidationError("instances differ in variables or domains", code="SHAPE_MISMATCH")


def magnitude_equivalent(a, b, max_vertices: int | None = None) -> EquivalenceReport:
    a, b = as_instance(a), as_instance(b)
    _same_shape(a, b)
    diff = np.flatnonzero(fitness_table(a, max_vertices) != fitness_table(b, max_vertices))
    if diff.size == 0:
        return EquivalenceReport("magnitude", True)
    return EquivalenceReport("magnitude", False, decode(int(diff[0]), a.domains))


def graph_divergence(Fa: np.ndarray, Fb: np.ndarray, domains) -> tuple | None:
    """First ``(x, variable, value)`` where the improving-move relation differs."""
    V = len(Fa)
    codes = np.arange(V, dtype=np.int64)
    best = None
    for k, (d, s) in enumerate(zip(domains, strides(domains)), start=1):
        digit = (codes // s) % d
        for v in range(d):
            tgt = codes + (v - digit) * s
            bad = (digit != v) & ((Fa[tgt] > Fa) != (Fb[tgt] > Fb))
            hits = np.flatnonzero(bad)
            if hits.size:
                cand = (int(hits[0]), k, v)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return None
    return decode(best[0], domains), best[1], best[2]


def sign_equivalent(a, b, max_vertices: int | None = None) -> EquivalenceReport:
    a, b = as_instance(a), as_instance(b)
    _same_shape(a, b)
    div = graph_divergence(fitness_table(a, max_vertices), fitness_table(b, max_vertices), a.domains)
    return EquivalenceReport("sign", div is None, div)


def trim_report(instance, max_vertices: int | None = None) -> TrimReport:
    """Trim and explain: removed edges, and for each kept edge a sign-dependence witness."""
    simple = instance if isinstance(instance, SimpleInstance) else simplify(instance)
    inst = simple.to_instance()
    F = fitness_table(inst, max_vertices)
    kept, removed, witnesses = {}, [], {}
    for (i, j), w in simple.binary.items():
        dep, x = sign_depends(inst, i, j, F)
        direction = (i, j)
        if not dep:
            dep, x = sign_depends(inst, j, i, F)
            direction = (j, i)
        if dep:
            kept[(i, j)] = w
            witnesses[(i, j)] = {"depends": direction[0], "on": direction[1], "x": x}
        else:
            removed.append((i, j))
    trimmed = SimpleInstance(simple.n, simple.constant, simple.unary, kept, simple.name)
    if removed:
        div = graph_divergence(F, fitness_table(trimmed, max_vertices), inst.domains)
        if div is not None:
            raise AssertionError(f"trimming changed the fitness graph at {div}")
    return TrimReport(trimmed, removed, witnesses)


def trim(instance, max_vertices: int | None = None) -> SimpleInstance:
    return trim_report(instance, max_vertices).instance


def is_trim(instance: SimpleInstance, max_vertices: int | None = None) -> bool:
    return not trim_report(instance, max_vertices).removed
