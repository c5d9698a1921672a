import itertools

import networkx as nx
import pytest

from vcspland import gen
from vcspland.core import SimpleInstance, constraint_graph, evaluate
from vcspland.errors import ValidationError
from vcspland.graph import build_fitness_graph, longest_improving_path, sign_interact
from vcspland.normal import simplify


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_quadratic_path_start_and_shape(n):
    inst = gen.quadratic_path(n)
    assert nx.is_tree(constraint_graph(inst)) and constraint_graph(inst).number_of_edges() == n - 1
    start = gen.quadratic_path_start(n)
    assert start[0] == 1 and start[1 % n] == 0
    assert evaluate(inst, (1,) * n) == n * (n - 1) // 2 + n


def test_quadratic_path_rejects_tiny_n():
    with pytest.raises(ValidationError):
        gen.quadratic_path(1)


@pytest.mark.parametrize(
    "s, t", [([3, 5, 7], 8), ([3, 5, 7], 9), ([2, 4], 5), ([1, 1, 1], 3), ([6], 6), ([6], 5)]
)
def test_subsetsum_star_decides(s, t):
    inst = gen.subsetsum_star(s, t)
    n = len(s)
    assert sign_interact(inst, n + 1, n + 2) == gen.subset_sum_exists(s, t)
    g = constraint_graph(inst)
    assert nx.is_tree(g) and g.degree(n + 2) == n + 1


def test_subset_sum_brute_force():
    assert gen.subset_sum_exists([3, 5, 7], 12)
    assert not gen.subset_sum_exists([3, 5, 7], 11)
    with pytest.raises(ValidationError):
        gen.subsetsum_star([], 3)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_domain3_schedule_is_exponential(n):
    inst = gen.domain3_counting(n)
    sched = gen.domain3_schedule(n)
    assert gen.check_schedule(inst, sched) is None
    assert sched[0] == (0,) * (n + 1)
    assert sched[-1] == (0,) + (1,) * n
    assert len(sched) - 1 >= 2**n - 1
    if n >= 3:
        assert len(sched) - 1 > 2**n
    assert longest_improving_path(build_fitness_graph(inst))[0] >= len(sched) - 1
    g = constraint_graph(inst)
    assert nx.is_tree(g) and max(d for _, d in g.degree) <= 2


def test_check_schedule_reports_bad_step():
    inst = gen.domain3_counting(2)
    sched = gen.domain3_schedule(2)
    assert "not a single flip" in gen.check_schedule(inst, [sched[0], sched[3]])
    assert "does not improve" in gen.check_schedule(inst, [sched[1], sched[0]])


@pytest.mark.parametrize("K", [1, 2, 3])
def test_treewidth2_family(K):
    fam = gen.treewidth2_family(K)
    inst = fam.instance
    assert inst.n == 4 * K + 1
    g = constraint_graph(inst)
    assert max(d for _, d in g.degree) <= 3
    assert gen.is_tree_decomposition(g, fam.bags, fam.decomposition_edges)
    assert gen.decomposition_width(fam.bags) == 2
    sched = gen.treewidth2_schedule(fam)
    assert gen.check_schedule(inst, sched) is None
    # the cascade doubles with every block
    assert len(sched) - 1 >= 2**K


def test_tree_decomposition_checker_rejects_bad_bags():
    g = nx.cycle_graph([1, 2, 3, 4])
    assert gen.is_tree_decomposition(g, [frozenset({1, 2, 3}), frozenset({1, 3, 4})], [(0, 1)])
    assert not gen.is_tree_decomposition(g, [frozenset({1, 2}), frozenset({3, 4})], [(0, 1)])
    assert not gen.is_tree_decomposition(g, [frozenset({1, 2, 3}), frozenset({1, 3, 4})], [])


@pytest.mark.parametrize("shape", gen.SHAPES)
def test_random_instance_shapes(shape):
    inst = gen.random_instance(9, shape, seed=7)
    g = constraint_graph(inst)
    assert sorted(g.nodes) == list(range(1, 10))
    if shape == "tree":
        assert nx.is_tree(g)
    elif shape == "path":
        assert nx.is_tree(g) and max(d for _, d in g.degree) == 2
    elif shape == "cycle":
        assert all(d == 2 for _, d in g.degree) and nx.is_connected(g)
    s = simplify(inst)
    assert all(s.unary.get(i) for i in range(1, 10))
    assert all(-10 <= w <= 10 and w for w in itertools.chain(s.unary.values(), s.binary.values()))


def test_random_instance_is_seeded():
    assert gen.random_instance(6, "random", seed=3) == gen.random_instance(6, "random", seed=3)
    assert gen.random_instance(6, "random", seed=3) != gen.random_instance(6, "random", seed=4)


def test_random_instance_general_form():
    inst = gen.random_instance(4, "path", seed=1, form="general", domain=3)
    assert inst.domains == (3, 3, 3, 3)
    assert all(len(c.values) == 3 ** c.arity for c in inst.constraints)
    with pytest.raises(ValidationError):
        gen.random_instance(4, domain=3)
    with pytest.raises(ValidationError):
        gen.random_instance(4, "star")
    with pytest.raises(ValidationError):
        gen.random_instance(4, weight_range=(0, 0))


def test_families_table():
    assert set(gen.FAMILIES) == {
        "quadratic_path", "domain3_counting", "treewidth2_counting", "subsetsum_star", "random_instance"
    }
    assert isinstance(simplify(gen.FAMILIES["quadratic_path"](3)), SimpleInstance)
