import itertools
import random
from dataclasses import replace

import pytest

from s4ci.algebra import Valuation, evaluate, validate_algebra
from s4ci.corpus import algebra_corpus, fixture_a2_space, random_formula, random_model, space_corpus
from s4ci.kripke import satisfies
from s4ci.stone import (FiniteTopSpace, KuratowskiError, StoneError, Topology, TopologyError,
                        algebra_atoms, algebra_to_topologies, completion_embed, dump_space, hat,
                        interior, is_ultrafilter, kuratowski_roundtrip, model_algebra, parse_space,
                        powerset_algebra, topo_canonical, ultrafilters, verify_representation)

from conftest import FIXTURES

A, B = 0b01, 0b10


def all_topologies(n: int):
    """Every topology on n points, by brute force over families of subsets."""
    full = (1 << n) - 1
    middle = [u for u in range(1, full)]
    for bits in range(1 << len(middle)):
        opens = frozenset([0, full] + [u for k, u in enumerate(middle) if bits >> k & 1])
        if all(u | v in opens and u & v in opens for u in opens for v in opens):
            yield Topology(full, opens)


# -- topologies and interiors ----------------------------------------------

def test_interior_examples():
    discrete = Topology(0b11, frozenset(range(4)))
    indiscrete = Topology(0b11, frozenset({0, 3}))
    sierpinski = Topology(0b11, frozenset({0, A, 3}))
    assert all(interior(discrete, y) == y for y in range(4))
    assert [interior(indiscrete, y) for y in range(3)] == [0, 0, 0]
    assert interior(sierpinski, A) == A
    assert interior(sierpinski, B) == 0


def test_topology_validation():
    with pytest.raises(TopologyError):
        Topology(0b11, frozenset({0, A}))
    with pytest.raises(TopologyError):
        Topology(0b111, frozenset({0, 0b001, 0b010, 0b111}))


def test_topology_counts():
    # number of topologies on 1..3 labelled points
    assert [sum(1 for _ in all_topologies(n)) for n in (1, 2, 3)] == [1, 4, 29]


def test_kuratowski_bijection():
    for n in (1, 2, 3):
        for tau in all_topologies(n):
            assert kuratowski_roundtrip(n, tau.table()) == tau


def test_kuratowski_examples():
    assert kuratowski_roundtrip(2, (0, 1, 2, 3)).opens == {0, 1, 2, 3}
    assert kuratowski_roundtrip(2, (0, 0, 0, 3)).opens == {0, 3}


@pytest.mark.parametrize("table,condition", [
    ((0, 1, 2, 2), "box X = X"),
    ((0, 1, 3, 3), "box Y is a subset of Y"),
    ((0, 0, 0, 3, 0, 0, 0, 3), "box X = X"),
    # opens {0, 011, 110, 111} miss the intersection 010
    ((0, 0, 0, 3, 0, 0, 6, 7), "box(Y & Z) = box Y & box Z"),
])
def test_kuratowski_reports_condition(table, condition):
    n = len(table).bit_length() - 1
    with pytest.raises(KuratowskiError) as info:
        kuratowski_roundtrip(n, table)
    assert info.value.condition == condition


# -- powerset algebras -----------------------------------------------------

def test_fixture_spaces(a1, a2):
    one = FiniteTopSpace.from_basic_opens(("a",), [[], []])
    assert powerset_algebra(one) == a1
    assert powerset_algebra(fixture_a2_space()) == a2


def test_random_powerset_algebras_are_valid():
    for s in space_corpus(seed=31, count=200, agent_counts=(2,)):
        assert validate_algebra(powerset_algebra(s)).ok


def test_topologies_recovered():
    for s in space_corpus(seed=32, count=200):
        back = algebra_to_topologies(powerset_algebra(s))
        assert back == s


def test_a2_topologies(a2):
    space = algebra_to_topologies(a2)
    assert [t.opens for t in space.topologies] == [{0, A, 3}, {0, B, 3}]
    assert space.common.opens == {0, 3}


def test_wrong_c_is_rejected(a2):
    with pytest.raises(StoneError):
        algebra_to_topologies(replace(a2, c=(0, A, 0, 3)))


# -- ultrafilters and hats -------------------------------------------------

def test_ultrafilter_examples(a1, a2):
    (u,) = ultrafilters(a1)
    assert u.members == {1}
    gens = sorted(u.generator for u in ultrafilters(a2))
    assert gens == [A, B]
    ults = ultrafilters(a2)
    for x, y in itertools.product(a2.elements, repeat=2):
        assert hat(ults, x | y) == hat(ults, x) | hat(ults, y)


def test_hat_is_boolean_embedding():
    for alg in algebra_corpus(seed=33, count=60):
        ults = ultrafilters(alg)
        assert len(ults) == len(alg.atoms)
        assert algebra_atoms(alg) == [1 << k for k in range(len(alg.atoms))]
        images = [hat(ults, a) for a in alg.elements]
        assert len(set(images)) == alg.size
        full = (1 << len(ults)) - 1
        for a, b in itertools.product(alg.elements, repeat=2):
            assert images[a & b] == images[a] & images[b]
            assert images[alg.comp(a)] == full & ~images[a]


def test_non_ultrafilters(a2):
    assert not is_ultrafilter(a2, {3})
    assert not is_ultrafilter(a2, set(a2.elements))
    assert is_ultrafilter(a2, {A, 3})


# -- canonical space and representation ------------------------------------

def test_canonical_a2(a2):
    cs = topo_canonical(a2)
    gens = [u.generator for u in cs.ults]
    ua, ub = 1 << gens.index(A), 1 << gens.index(B)
    assert cs.space.topologies[0].opens == {0, ua, 3}
    assert cs.space.topologies[1].opens == {0, ub, 3}
    assert interior(cs.space.common, cs.hat(A)) == 0 == cs.hat(a2.cop(A))


def test_canonical_a1(a1):
    cs = topo_canonical(a1)
    assert cs.space.full == 1
    assert cs.space.topologies[0].opens == {0, 1}


def test_representation_on_corpus(a1, a2):
    assert verify_representation(a1).ok
    assert verify_representation(a2).ok
    for alg in algebra_corpus(seed=34, count=120):
        report = verify_representation(alg)
        assert report.ok, report.lines()


def test_completion_is_isomorphism(a1, a2):
    assert completion_embed(a1).ok
    assert completion_embed(a2).ok
    for alg in algebra_corpus(seed=35, count=60):
        assert completion_embed(alg).ok


# -- Kripke models as spaces -----------------------------------------------

def test_model_algebra_matches_kripke_semantics():
    rng = random.Random(36)
    for _ in range(150):
        m = random_model(rng, max_worlds=4)
        alg = model_algebra(m)
        assert validate_algebra(alg).ok
        v = Valuation(alg, {k: sum(1 << w for w in ws) for k, ws in m.valuation.items()})
        f = random_formula(rng, 3)
        got = evaluate(v, f)
        assert got == sum(1 << w for w in range(m.size) if satisfies(m, w, f))


# -- file format -----------------------------------------------------------

def test_space_file(a2):
    space = parse_space((FIXTURES / "a2.space").read_text())
    assert space == fixture_a2_space()
    assert powerset_algebra(space) == a2


def test_space_dump_roundtrip():
    for s in space_corpus(seed=37, count=60):
        assert parse_space(dump_space(s)) == s


@pytest.mark.parametrize("text", [
    "points a\n",
    "agents 1\nopen 0: a\npoints a\n",
    "agents 1\npoints a\nopen 0: z\n",
    "agents 1\npoints a\nopen 2: a\n",
    "agents 1\npoints a\nglue\n",
])
def test_bad_space_files(text):
    with pytest.raises(TopologyError):
        parse_space(text)
