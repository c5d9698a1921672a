"""Explicit fitness graphs over the 1-flip neighbourhood.

Vertices are assignment codes (mixed radix, variable 1 most significant).
An edge ``x -> y`` exists when ``y`` differs from ``x`` in one variable and
has strictly higher fitness, so the graph is acyclic by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    VcspInstance,
    as_instance,
    decode,
    format_assignment,
    require_binary_boolean,
    strides,
)
from .errors import BudgetError, ValidationError

DEFAULT_MAX_VERTICES = 2**22


def check_budget(instance: VcspInstance, max_vertices: int | None):
    V = instance.num_assignments
    limit = DEFAULT_MAX_VERTICES if max_vertices is None else max_vertices
    if V > limit:
        raise BudgetError(
            f"{V} assignments exceed the vertex budget of {limit}", vertices=V, max_vertices=limit
        )
    return V


def fitness_table(instance, max_vertices: int | None = None) -> np.ndarray:
    instance = as_instance(instance)
    check_budget(instance, max_vertices)
    return kernels.fitness_table(instance)


@dataclass(frozen=True, eq=False)
class FitnessGraph:
    instance: VcspInstance
    fitness: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def num_vertices(self) -> int:
        return len(self.fitness)

    @property
    def num_edges(self) -> int:
        return len(self.indices)

    @property
    def domains(self) -> tuple:
        return self.instance.domains

    def successors(self, code: int) -> list:
        return self.indices[self.indptr[code] : self.indptr[code + 1]].tolist()

    def has_edge(self, x: int, y: int) -> bool:
        return y in self.successors(x)

    def edge_set(self) -> set:
        src = np.repeat(np.arange(self.num_vertices), np.diff(self.indptr))
        return set(zip(src.tolist(), self.indices.tolist()))

    def assignment(self, code: int) -> tuple:
        return decode(code, self.domains)

    def label(self, code: int) -> str:
        return format_assignment(decode(code, self.domains), self.domains)

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)


def build_fitness_graph(instance, max_vertices: int | None = None) -> FitnessGraph:
    instance = as_instance(instance)
    F = fitness_table(instance, max_vertices)
    indptr, indices = kernels.improving_edges(F, instance.domains)
    for arr in (F, indptr, indices):
        arr.setflags(write=False)
    return FitnessGraph(instance, F, indptr, indices)


def longest_improving_path(g: FitnessGraph) -> tuple:
    """Number of edges on a longest directed path, and one witness path.

    Ties are broken towards the smallest assignment code: the path ends at the
    smallest code of maximal length and each step back picks the smallest
    predecessor of equal length.
    """
    length, pred = kernels.longest_path(g.fitness, g.indptr, g.indices)
    if len(length) == 0:
        return 0, []
    end = int(np.argmax(length))
    best = int(length[end])
    path = [end]
    while pred[path[-1]] >= 0:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return best, path


def local_optima(g: FitnessGraph) -> list:
    return np.flatnonzero(g.out_degrees() == 0).tolist()


def has_cycle(g: FitnessGraph) -> bool:
    """Independent cycle check by iterative three-colour DFS."""
    V = g.num_vertices
    colour = bytearray(V)
    ip = g.indptr.tolist()
    ix = g.indices.tolist()
    for root in range(V):
        if colour[root]:
            continue
        stack = [(root, ip[root])]
        colour[root] = 1
        while stack:
            v, e = stack[-1]
            if e < ip[v + 1]:
                stack[-1] = (v, e + 1)
                w = ix[e]
                if colour[w] == 1:
                    return True
                if colour[w] == 0:
                    colour[w] = 1
                    stack.append((w, ip[w]))
            else:
                colour[v] = 2
                stack.pop()
    return False


def _bit(instance, i):
    if not 1 <= i <= instance.n:
        raise ValidationError(f"variable {i} outside 1..{instance.n}", code="SCOPE_RANGE")
    return strides(instance.domains)[i - 1]


def sign_depends(instance, i: int, j: int, fitness: np.ndarray | None = None, max_vertices: int | None = None):
    """Does variable ``i`` sign-depend on ``j``?

    Returns ``(True, x)`` with the smallest assignment ``x`` such that
    ``x -> x[i flipped]`` is an edge but ``x[j flipped] -> x[i, j flipped]``
    is not, or ``(False, None)``. Decided by scanning all ``2^n`` assignments.
    """
    instance = as_instance(instance)
    require_binary_boolean(instance, "sign-dependence")
    if i == j:
        raise ValidationError("sign-dependence needs two distinct variables", code="SAME_VARIABLE")
    bi, bj = _bit(instance, i), _bit(instance, j)
    if fitness is None:
        fitness = fitness_table(instance, max_vertices)
    code = kernels.sign_dependence_witness(fitness, bi, bj)
    if code < 0:
        return False, None
    return True, decode(code, instance.domains)


def sign_interact(instance, i: int, j: int, fitness: np.ndarray | None = None, max_vertices: int | None = None) -> bool:
    instance = as_instance(instance)
    if fitness is None:
        require_binary_boolean(instance, "sign-interaction")
        fitness = fitness_table(instance, max_vertices)
    return sign_depends(instance, i, j, fitness)[0] or sign_depends(instance, j, i, fitness)[0]


def stats(g: FitnessGraph) -> dict:
    length, path = longest_improving_path(g)
    return {
        "vertices": g.num_vertices,
        "edges": g.num_edges,
        "local_optima": len(local_optima(g)),
        "longest_path": length,
        "witness": [g.label(c) for c in path],
    }
