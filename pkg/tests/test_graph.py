import numpy as np
import pytest
from conftest import boolean_binary_instances, mixed_instances
from hypothesis import given
from oracles import all_assignments, dfs_longest_path, naive_edges, naive_evaluate, naive_sign_depends

from vcspland import gen
from vcspland.core import Constraint, SimpleInstance, VcspInstance, decode, encode
from vcspland.errors import BudgetError, UnsupportedError, ValidationError
from vcspland.graph import (
    build_fitness_graph,
    check_budget,
    fitness_table,
    has_cycle,
    local_optima,
    longest_improving_path,
    sign_depends,
    sign_interact,
    stats,
)


def _decoded_edges(g):
    return {(decode(x, g.domains), decode(y, g.domains)) for x, y in g.edge_set()}


@given(mixed_instances())
def test_edges_match_oracle(inst):
    g = build_fitness_graph(inst)
    assert _decoded_edges(g) == naive_edges(inst)
    assert g.num_edges == len(naive_edges(inst))


@given(mixed_instances())
def test_fitness_table_matches_oracle(inst):
    F = fitness_table(inst)
    for x in all_assignments(inst.domains):
        assert F[encode(x, inst.domains)] == naive_evaluate(inst, x)


@given(mixed_instances())
def test_longest_path_matches_dfs(inst):
    g = build_fitness_graph(inst)
    length, path = longest_improving_path(g)
    assert length == dfs_longest_path(inst)
    assert len(path) == length + 1
    for a, b in zip(path, path[1:]):
        assert g.has_edge(a, b)


@given(boolean_binary_instances(max_n=6))
def test_graph_is_acyclic(inst):
    assert not has_cycle(build_fitness_graph(inst))


def test_has_cycle_detects_a_cycle():
    g = build_fitness_graph(VcspInstance.boolean(2))
    cyc = type(g)(g.instance, g.fitness, np.array([0, 1, 2, 2, 2]), np.array([1, 0]))
    assert has_cycle(cyc)


def test_witness_prefers_smallest_code():
    # every vertex has fitness 0 except 11; two paths of length one end there
    inst = VcspInstance.boolean(2, [Constraint((1, 2), (0, 0, 0, 1))])
    length, path = longest_improving_path(build_fitness_graph(inst))
    assert length == 1 and path == [1, 3]


def test_local_optima_and_stats(xor_instance):
    g = build_fitness_graph(xor_instance)
    assert local_optima(g) == [1, 2]
    s = stats(g)
    assert s == {"vertices": 4, "edges": 4, "local_optima": 2, "longest_path": 1, "witness": ["00", "01"]}


def test_two_unary_longest_path_is_two():
    g = build_fitness_graph(SimpleInstance(2, 1, {1: 1, 2: 1}))
    assert longest_improving_path(g)[0] == 2
    assert local_optima(g) == [3]


@pytest.mark.parametrize("n", range(2, 8))
def test_quadratic_path_length(n):
    g = build_fitness_graph(gen.quadratic_path(n))
    assert longest_improving_path(g)[0] == n * (n - 1) // 2 + n


def test_budget_is_enforced_before_enumeration():
    inst = VcspInstance.boolean(30)
    with pytest.raises(BudgetError) as err:
        build_fitness_graph(inst)
    assert err.value.details["vertices"] == 2**30
    assert check_budget(VcspInstance.boolean(4), 16) == 16
    with pytest.raises(BudgetError):
        check_budget(VcspInstance.boolean(4), 15)


def test_overflow_is_refused():
    inst = VcspInstance.boolean(1, [Constraint((1,), (0, 2**63))])
    with pytest.raises(ValidationError) as err:
        fitness_table(inst)
    assert err.value.code == "OVERFLOW"


@given(boolean_binary_instances(min_n=2, max_n=5))
def test_sign_depends_matches_oracle(inst):
    for i in range(1, inst.n + 1):
        for j in range(1, inst.n + 1):
            if i != j:
                dep, x = sign_depends(inst, i, j)
                assert dep == naive_sign_depends(inst, i, j)
                if dep:
                    assert x is not None and len(x) == inst.n


def test_sign_depends_witness_is_a_real_witness():
    inst = SimpleInstance(2, 0, {1: 1}, {(1, 2): -2})
    dep, x = sign_depends(inst, 1, 2)
    assert dep and x == (0, 0)
    assert sign_interact(inst, 1, 2)


def test_non_interacting_edge():
    # the binary weight is too small to change any sign
    inst = SimpleInstance(2, 0, {1: 5, 2: 5}, {(1, 2): 1})
    assert not sign_interact(inst, 1, 2)


def test_sign_depends_rejects_bad_input():
    with pytest.raises(ValidationError):
        sign_depends(VcspInstance.boolean(2), 1, 1)
    with pytest.raises(ValidationError):
        sign_depends(VcspInstance.boolean(2), 1, 3)
    with pytest.raises(UnsupportedError):
        sign_depends(VcspInstance(2, (3, 2), ()), 1, 2)
