import json

import pytest
from conftest import simple_instances
from hypothesis import given
from hypothesis import strategies as st
from oracles import naive_gain

from vcspland import gen
from vcspland.core import SimpleInstance, VcspInstance, evaluate
from vcspland.dynamics import (
    SearchPolicy,
    Trace,
    TraceAnalysis,
    encouragement_forest,
    gain,
    run_search,
    supports,
    trace_from_jsonl,
    verify_trace_properties,
)
from vcspland.errors import ValidationError
from vcspland.graph import build_fitness_graph, local_optima


def _trace(simple, labels):
    inst = simple.to_instance()
    xs = [tuple(int(ch) for ch in s) for s in labels.split()]
    return Trace(inst, tuple(xs), tuple(evaluate(inst, x) for x in xs))


def test_quadratic_walk_and_forest():
    tr = run_search(gen.quadratic_path(4), (1, 0, 1, 0), "first")
    assert tr.labels() == "1010 0010 0110 1110 1100 1000 0000 0001 0011 0111 1111".split()
    assert all(b - a == 1 for a, b in zip(tr.fitness, tr.fitness[1:]))
    forest = encouragement_forest(tr)
    assert forest.roots() == [1, 2, 4, 7]
    assert forest.format_chains() == [
        "⊥ ⇐ (1,1↦0)",
        "⊥ ⇐ (2,2↦1) ⇐ (3,1↦1)",
        "⊥ ⇐ (4,3↦0) ⇐ (5,2↦0) ⇐ (6,1↦0)",
        "⊥ ⇐ (7,4↦1) ⇐ (8,3↦1) ⇐ (9,2↦1) ⇐ (10,1↦1)",
    ]
    assert verify_trace_properties(tr).passed


@given(simple_instances(min_n=2, max_n=5), st.data())
def test_gain_is_antisymmetric_and_matches_oracle(s, data):
    inst = s.to_instance()
    x = tuple(data.draw(st.lists(st.integers(0, 1), min_size=s.n, max_size=s.n)))
    i = data.draw(st.integers(1, s.n))
    for b in (0, 1):
        assert gain(inst, x, i, b) == naive_gain(inst, x, i, b)
    assert gain(inst, x, i, 0) == -gain(inst, x, i, 1)


@pytest.mark.parametrize("kind", ["first", "steepest", "worst", "random"])
def test_search_ends_at_local_optimum(kind):
    inst = gen.random_instance(7, "random", seed=5, density=0.5)
    tr = run_search(inst, (0,) * 7, SearchPolicy(kind, seed=2))
    g = build_fitness_graph(inst)
    last = sum(v << (6 - k) for k, v in enumerate(tr.x(tr.T)))
    assert last in local_optima(g)
    assert not tr.truncated


def test_steepest_and_worst_choose_extreme_moves():
    s = SimpleInstance(3, 0, {1: 1, 2: 3, 3: 2})
    assert run_search(s.to_instance(), (0, 0, 0), "steepest").flips == [(2, 1), (3, 1), (1, 1)]
    assert run_search(s.to_instance(), (0, 0, 0), "worst").flips == [(1, 1), (3, 1), (2, 1)]


def test_random_policy_is_reproducible():
    inst = gen.random_instance(9, "tree", seed=1)
    a = run_search(inst, (0,) * 9, SearchPolicy("random", seed=4))
    b = run_search(inst, (0,) * 9, SearchPolicy("random", seed=4))
    assert a.assignments == b.assignments


def test_custom_order_and_step_limit():
    inst = SimpleInstance(3, 0, {1: 1, 2: 1, 3: 1}).to_instance()
    tr = run_search(inst, (0, 0, 0), SearchPolicy("first", order=(3, 1, 2)))
    assert tr.flips == [(3, 1), (1, 1), (2, 1)]
    short = run_search(inst, (0, 0, 0), SearchPolicy("first", step_limit=2))
    assert short.truncated and short.T == 3


def test_domain3_move_order_gives_long_walk():
    inst = gen.domain3_counting(4)
    tr = run_search(inst, (0,) * 5, SearchPolicy("first", order=gen.domain3_move_order(4)))
    assert tr.T - 1 > 16


def test_trace_validation():
    inst = VcspInstance.boolean(2)
    with pytest.raises(ValidationError) as err:
        Trace(inst, ((0, 0), (1, 1)), (0, 1))
    assert err.value.code == "NOT_ONE_FLIP"
    with pytest.raises(ValidationError) as err:
        Trace(inst, ((0, 0), (1, 0)), (0, 0))
    assert err.value.code == "NOT_IMPROVING"
    with pytest.raises(ValidationError):
        SearchPolicy("sideways")


def test_jsonl_roundtrip():
    inst = gen.quadratic_path(3)
    tr = run_search(inst, (0, 0, 0), "first")
    text = tr.to_jsonl()
    first = json.loads(text.splitlines()[0])
    assert first["step"] == 1 and first["policy"] == "first"
    again = trace_from_jsonl(text, inst)
    assert again.assignments == tr.assignments
    bad = text.replace('"fitness": %d' % tr.fitness[1], '"fitness": 99', 1)
    with pytest.raises(ValidationError) as err:
        trace_from_jsonl(bad, inst)
    assert err.value.code == "TRACE_FITNESS"


def test_support_kinds():
    # 1 and 2 want to agree; flipping 1 on makes flipping 2 on improving
    s = SimpleInstance(2, 0, {1: 1, 2: -1}, {(1, 2): 3})
    tr = _trace(s, "00 10 11")
    assert supports(tr, 1, 2) == "strong"
    assert supports(tr, 2, 1) == "none"
    assert TraceAnalysis(tr).encourager(1) is None


def test_forest_corruption_is_detected():
    tr = run_search(gen.quadratic_path(4), (1, 0, 1, 0), "first")
    forest = encouragement_forest(tr)
    parents = list(forest.parents)
    parents[9] = None
    bad = type(forest)(tuple(parents), forest.flips)
    rep = verify_trace_properties(tr, bad)
    assert not rep["forest-consistent"].passed


# The three traces below are worked counterexamples: each is a genuine
# improving walk on which a structural property of encouragement fails.


def test_tree_trace_with_courageous_flip_not_improving_at_start():
    s = SimpleInstance(4, 0, {1: -1, 2: 1, 3: 1, 4: 4}, {(1, 2): 2, (1, 3): 2, (2, 4): -3})
    tr = _trace(s, "0000 0100 0110 0111 0011 1011")
    rep = verify_trace_properties(tr)
    assert rep["gain-positive-since-encourager"].witness == {"flip": 5, "encourager": None, "t": 1}
    assert rep["forest-consistent"].passed


def test_triangle_trace_with_too_many_roots():
    s = SimpleInstance(3, 0, {1: -10, 2: 2, 3: -5}, {(1, 2): -6, (1, 3): 9, (2, 3): 8})
    tr = _trace(s, "110 100 101 001 000 010 011")
    rep = verify_trace_properties(tr)
    assert rep["roots-at-most-n"].witness == {"roots": 4}


def test_tree_trace_with_too_many_roots():
    s = SimpleInstance(4, 0, {1: -2, 2: -5, 3: 5, 4: 6}, {(1, 3): 6, (1, 4): -5, (2, 4): -4})
    tr = _trace(s, "1101 1100 0100 0000 0010 1010 1011 0011")
    forest = encouragement_forest(tr)
    assert len(forest.roots()) == 5
    assert 6 in forest.roots() and tr.flip(6) == (4, 1)
    assert not verify_trace_properties(tr)["roots-at-most-n"].passed
