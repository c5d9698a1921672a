import itertools
import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from vcspland import Constraint, SimpleInstance, VcspInstance  # noqa: E402

settings.register_profile(
    "repo", derandomize=True, max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@st.composite
def boolean_binary_instances(draw, min_n=1, max_n=6, weights=st.integers(-8, 8)):
    """Random Boolean instances with arity at most two and arbitrary tables."""
    n = draw(st.integers(min_n, max_n))
    cons = []
    if draw(st.booleans()):
        cons.append(Constraint((), (draw(weights),)))
    for i in range(1, n + 1):
        if draw(st.booleans()):
            cons.append(Constraint((i,), tuple(draw(st.lists(weights, min_size=2, max_size=2)))))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    for p in pairs:
        if draw(st.integers(0, 2)) == 0:
            cons.append(Constraint(p, tuple(draw(st.lists(weights, min_size=4, max_size=4)))))
    return VcspInstance.boolean(n, cons)


@st.composite
def mixed_instances(draw, max_n=4, max_domain=3):
    """Random instances over small mixed domains with constraints up to arity three."""
    n = draw(st.integers(1, max_n))
    doms = tuple(draw(st.lists(st.integers(2, max_domain), min_size=n, max_size=n)))
    scopes = [s for r in (1, 2, 3) for s in itertools.combinations(range(1, n + 1), r)]
    cons = []
    for s in scopes:
        if draw(st.integers(0, 2)) == 0:
            size = 1
            for v in s:
                size *= doms[v - 1]
            cons.append(Constraint(s, tuple(draw(st.lists(st.integers(-6, 6), min_size=size, max_size=size)))))
    return VcspInstance(n, doms, tuple(cons))


@st.composite
def simple_instances(draw, min_n=1, max_n=6, tree=False):
    n = draw(st.integers(min_n, max_n))
    nz = st.integers(-6, 6).filter(bool)
    unary = {i: draw(nz) for i in range(1, n + 1) if draw(st.booleans())}
    if tree:
        pairs = [(draw(st.integers(1, j - 1)), j) for j in range(2, n + 1)]
    else:
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if draw(st.integers(0, 2)) == 0]
    binary = {p: draw(nz) for p in pairs}
    return SimpleInstance(n, draw(st.integers(-3, 3)), unary, binary)


@pytest.fixture
def xor_instance():
    return VcspInstance.boolean(2, [Constraint((1, 2), (0, 1, 1, 0))])
