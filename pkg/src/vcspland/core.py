"""Instances of the valued constraint satisfaction problem (VCSP).

Variables are labelled ``1..n`` everywhere in the public API, matching the
instance file format. An assignment is a plain tuple ``x`` where ``x[k]`` is
the value of variable ``k + 1``.

Constraint tables are stored row-major in mixed radix with the smallest scope
variable most significant, so for a binary constraint on ``(i, j)`` with
``i < j`` the value of ``x_i`` selects the row and ``x_j`` the column.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import UnsupportedError, ValidationError

Assignment = tuple


def _check_int(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{what} must be an integer, got {value!r}", code="NON_INTEGER")
    return value


@dataclass(frozen=True)
class Constraint:
    """A valued constraint: an integer table over the product of its scope's domains."""

    scope: tuple
    values: tuple

    def __post_init__(self):
        scope = tuple(_check_int(v, "scope entry") for v in self.scope)
        for a, b in zip(scope, scope[1:]):
            if a >= b:
                raise ValidationError(
                    f"scope {list(scope)} is not strictly increasing", code="SCOPE_ORDER", scope=list(scope)
                )
        values = tuple(_check_int(v, "constraint value") for v in self.values)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "values", values)

    @property
    def arity(self) -> int:
        return len(self.scope)

    def span(self) -> int:
        return max(self.values) - min(self.values)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def index(self, x: Sequence[int], domains: Sequence[int]) -> int:
        idx = 0
        for var in self.scope:
            idx = idx * domains[var - 1] + x[var - 1]
        return idx


@dataclass(frozen=True)
class VcspInstance:
    n: int
    domains: tuple
    constraints: tuple
    name: str | None = None

    def __post_init__(self):
        n = _check_int(self.n, "n")
        if n < 1:
            raise ValidationError("n must be positive", code="BAD_N")
        domains = tuple(_check_int(d, "domain size") for d in self.domains)
        if len(domains) != n:
            raise ValidationError(f"expected {n} domain sizes, got {len(domains)}", code="DOMAIN_COUNT")
        for k, d in enumerate(domains, start=1):
            if d < 2:
                raise ValidationError(f"variable {k} has domain size {d} < 2", code="DOMAIN_SIZE", variable=k)
        constraints = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        seen = set()
        for c in constraints:
            for var in c.scope:
                if not 1 <= var <= n:
                    raise ValidationError(
                        f"scope {list(c.scope)} has variable {var} outside 1..{n}",
                        code="SCOPE_RANGE",
                        scope=list(c.scope),
                    )
            expected = math.prod(domains[v - 1] for v in c.scope)
            if len(c.values) != expected:
                raise ValidationError(
                    f"scope {list(c.scope)} needs {expected} values, got {len(c.values)}",
                    code="TABLE_SIZE",
                    scope=list(c.scope),
                )
            if c.scope in seen:
                raise ValidationError(f"duplicate scope {list(c.scope)}", code="DUPLICATE_SCOPE", scope=list(c.scope))
            seen.add(c.scope)
        constraints = tuple(sorted(constraints, key=lambda c: (len(c.scope), c.scope)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "domains", domains)
        object.__setattr__(self, "constraints", constraints)

    @classmethod
    def boolean(cls, n, constraints=(), name=None):
        return cls(n, (2,) * n, tuple(constraints), name)

    @property
    def num_assignments(self) -> int:
        return math.prod(self.domains)

    @property
    def is_boolean(self) -> bool:
        return all(d == 2 for d in self.domains)

    @property
    def arity(self) -> int:
        return max((c.arity for c in self.constraints), default=0)

    def constraint(self, *scope):
        for c in self.constraints:
            if c.scope == tuple(scope):
                return c
        return None

    def with_constraints(self, constraints, name=None):
        return VcspInstance(self.n, self.domains, tuple(constraints), name if name is not None else self.name)

    def fitness_bound(self) -> int:
        """Upper bound on ``|f(x)|`` over all assignments."""
        return sum(max(abs(v) for v in c.values) for c in self.constraints)


@dataclass(frozen=True)
class SimpleInstance:
    """Binary Boolean normal form: ``f(x) = constant + sum c_i x_i + sum c_ij x_i x_j``.

    ``unary`` maps a variable to its weight and ``binary`` maps a sorted pair to
    its weight. Only nonzero weights are stored.
    """

    n: int
    constant: int = 0
    unary: Mapping = field(default_factory=dict)
    binary: Mapping = field(default_factory=dict)
    name: str | None = None

    def __post_init__(self):
        n = _check_int(self.n, "n")
        if n < 1:
            raise ValidationError("n must be positive", code="BAD_N")
        _check_int(self.constant, "constant")
        unary = {}
        for i, w in sorted(self.unary.items()):
            _check_int(w, "unary weight")
            if not 1 <= i <= n:
                raise ValidationError(f"unary weight on variable {i} outside 1..{n}", code="SCOPE_RANGE")
            if w == 0:
                raise ValidationError(f"zero unary weight stored for variable {i}", code="ZERO_WEIGHT")
            unary[i] = w
        binary = {}
        for key, w in self.binary.items():
            i, j = sorted(key)
            _check_int(w, "binary weight")
            if i == j or not (1 <= i and j <= n):
                raise ValidationError(f"bad binary scope {key}", code="SCOPE_RANGE")
            if w == 0:
                raise ValidationError(f"zero binary weight stored for {(i, j)}", code="ZERO_WEIGHT")
            if (i, j) in binary:
                raise ValidationError(f"duplicate binary scope {(i, j)}", code="DUPLICATE_SCOPE")
            binary[(i, j)] = w
        object.__setattr__(self, "unary", unary)
        object.__setattr__(self, "binary", dict(sorted(binary.items())))

    def edges(self) -> set:
        return set(self.binary)

    def neighbours(self, i) -> list:
        return sorted(b if a == i else a for (a, b) in self.binary if i in (a, b))

    def weight(self, i, j=None) -> int:
        if j is None:
            return self.unary.get(i, 0)
        return self.binary.get((min(i, j), max(i, j)), 0)

    def to_instance(self) -> VcspInstance:
        cons = []
        if self.constant:
            cons.append(Constraint((), (self.constant,)))
        for i, w in self.unary.items():
            cons.append(Constraint((i,), (0, w)))
        for (i, j), w in self.binary.items():
            cons.append(Constraint((i, j), (0, 0, 0, w)))
        return VcspInstance.boolean(self.n, cons, self.name)

    def evaluate(self, x) -> int:
        total = self.constant
        for i, w in self.unary.items():
            total += w * x[i - 1]
        for (i, j), w in self.binary.items():
            total += w * x[i - 1] * x[j - 1]
        return total

    def scaled(self, factor: int) -> "SimpleInstance":
        return SimpleInstance(
            self.n,
            self.constant * factor,
            {i: w * factor for i, w in self.unary.items()},
            {e: w * factor for e, w in self.binary.items()},
            self.name,
        )


def as_instance(obj) -> VcspInstance:
    if isinstance(obj, SimpleInstance):
        return obj.to_instance()
    if isinstance(obj, VcspInstance):
        return obj
    raise TypeError(f"expected an instance, got {type(obj).__name__}")


def check_assignment(instance: VcspInstance, x) -> tuple:
    x = tuple(x)
    if len(x) != instance.n:
        raise ValidationError(
            f"assignment has length {len(x)}, instance has {instance.n} variables", code="ASSIGNMENT"
        )
    for k, (v, d) in enumerate(zip(x, instance.domains), start=1):
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < d:
            raise ValidationError(f"variable {k} has value {v!r} outside 0..{d - 1}", code="ASSIGNMENT", variable=k)
    return x


def evaluate(instance, x) -> int:
    """Exact fitness of ``x``: the sum of every constraint on its restriction of ``x``."""
    instance = as_instance(instance)
    x = check_assignment(instance, x)
    doms = instance.domains
    return sum(c.values[c.index(x, doms)] for c in instance.constraints)


def strides(domains: Sequence[int]) -> tuple:
    out = [1] * len(domains)
    for k in range(len(domains) - 2, -1, -1):
        out[k] = out[k + 1] * domains[k + 1]
    return tuple(out)


def encode(x: Sequence[int], domains: Sequence[int]) -> int:
    """Mixed-radix code of an assignment, variable 1 most significant."""
    code = 0
    for v, d in zip(x, domains):
        code = code * d + v
    return code


def decode(code: int, domains: Sequence[int]) -> tuple:
    out = []
    for d in reversed(domains):
        code, v = divmod(code, d)
        out.append(v)
    return tuple(reversed(out))


def format_assignment(x: Sequence[int], domains: Sequence[int] | None = None) -> str:
    if domains is None or max(domains) <= 10:
        return "".join(str(v) for v in x)
    return ",".join(str(v) for v in x)


def parse_assignment(text: str, instance: VcspInstance) -> tuple:
    text = text.strip()
    parts = text.split(",") if "," in text else list(text)
    try:
        x = tuple(int(p) for p in parts)
    except ValueError:
        raise ValidationError(f"cannot parse assignment {text!r}", code="ASSIGNMENT") from None
    return check_assignment(instance, x)


def constraint_graph(instance) -> nx.Graph:
    """Undirected graph on ``1..n`` with an edge for every binary scope whose table is not all zero."""
    instance = as_instance(instance)
    if instance.arity > 2:
        raise UnsupportedError(
            f"constraint graph needs arity <= 2, instance has arity {instance.arity}", code="UNSUPPORTED_ARITY"
        )
    g = nx.Graph()
    g.add_nodes_from(range(1, instance.n + 1))
    g.add_edges_from(c.scope for c in instance.constraints if c.arity == 2 and not c.is_zero())
    return g


def require_binary_boolean(instance: VcspInstance, what: str):
    if not instance.is_boolean:
        raise UnsupportedError(f"{what} needs Boolean domains", code="UNSUPPORTED_DOMAIN")
    if instance.arity > 2:
        raise UnsupportedError(f"{what} needs arity <= 2", code="UNSUPPORTED_ARITY")


# -- serialization -------------------------------------------------------------


def serialize(instance) -> str:
    """Canonical JSON text: constraints ordered by (arity, scope), one per line."""
    instance = as_instance(instance)
    lines = ["{", f'  "n": {instance.n},', f'  "domains": {json.dumps(list(instance.domains))},']
    cons = [
        '    {"scope": %s, "values": %s}' % (json.dumps(list(c.scope)), json.dumps(list(c.values)))
        for c in instance.constraints
    ]
    if cons:
        lines.append('  "constraints": [')
        lines.append(",\n".join(cons))
        lines.append("  ]" + ("," if instance.name is not None else ""))
    else:
        lines.append('  "constraints": []' + ("," if instance.name is not None else ""))
    if instance.name is not None:
        lines.append(f'  "name": {json.dumps(instance.name, ensure_ascii=False)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _as_list(obj, what):
    if not isinstance(obj, list):
        raise ValidationError(f"{what} must be a JSON array", code="MALFORMED_JSON")
    return obj


def from_dict(data) -> VcspInstance:
    if not isinstance(data, dict):
        raise ValidationError("instance must be a JSON object", code="MALFORMED_JSON")
    for key in ("n", "domains", "constraints"):
        if key not in data:
            raise ValidationError(f"missing field {key!r}", code="MALFORMED_JSON")
    cons = []
    for entry in _as_list(data["constraints"], "constraints"):
        if not isinstance(entry, dict) or "scope" not in entry or "values" not in entry:
            raise ValidationError("each constraint needs 'scope' and 'values'", code="MALFORMED_JSON")
        cons.append(
            Constraint(tuple(_as_list(entry["scope"], "scope")), tuple(_as_list(entry["values"], "values")))
        )
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ValidationError("name must be a string", code="MALFORMED_JSON")
    return VcspInstance(data["n"], tuple(_as_list(data["domains"], "domains")), tuple(cons), name)


def parse(text: str) -> VcspInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}", code="MALFORMED_JSON") from None
    return from_dict(data)


def union(a: VcspInstance, b: VcspInstance, name=None) -> VcspInstance:
    """Instance containing the constraints of both; scopes must be disjoint."""
    if a.domains != b.domains:
        raise ValidationError("instances have different domains", code="SHAPE_MISMATCH")
    return VcspInstance(a.n, a.domains, a.constraints + b.constraints, name)


def iter_assignments(domains: Sequence[int]) -> Iterable[tuple]:
    """All assignments in increasing code order."""
    return itertools.product(*(range(d) for d in domains))
