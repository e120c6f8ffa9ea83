import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from s4ci.corpus import fixture_a1, fixture_a2, fixture_m1
from s4ci.syntax import BOT, Box, C, Imp, Var

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def a1():
    return fixture_a1()


@pytest.fixture
def a2():
    return fixture_a2()


@pytest.fixture
def m1():
    return fixture_m1()


@pytest.fixture
def rng():
    return random.Random(1234)


def formulas(agents: int = 2, n_vars: int = 2, max_leaves: int = 8):
    """Hypothesis strategy for primitive formulas."""
    leaf = st.one_of(st.just(BOT), st.integers(0, n_vars - 1).map(Var))

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: Imp(*p)),
            st.tuples(st.integers(0, agents - 1), children).map(lambda p: Box(*p)),
            children.map(C),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)
