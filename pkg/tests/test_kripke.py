import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from s4ci.corpus import random_formula, random_model
from s4ci.kripke import (KripkeModel, ModelError, dump_model, exhaustive_counterexample, frames,
                         globally_true, parse_model, preorders, refute_consequence, satisfies,
                         satisfies_gfp, transitive_closure, validate_model)
from s4ci.prooftree import schema_instances, tautology_instances
from s4ci.syntax import BOT, TOP, Box, C, Imp, Var, conj, e_op, parse

from conftest import FIXTURES


def naive_closure(rel, worlds):
    """Compose until nothing new appears."""
    out = set(rel)
    while True:
        extra = {(a, d) for a, b in out for c, d in out if b == c} - out
        if not extra:
            return frozenset(out)
        out |= extra


# -- validation ------------------------------------------------------------

def test_single_world_is_valid():
    m = KripkeModel.build(["w"], [[("w", "w")], [("w", "w")]], {})
    assert validate_model(m).ok


def test_missing_s_pair_is_reported():
    m = KripkeModel.build(["a", "b"], [[("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")]], {},
                          s_relation=[("a", "b"), ("b", "a"), ("b", "b")])
    report = validate_model(m)
    assert not report.ok
    assert ("a", "a") in [v.witness for v in report.violations]


def test_non_reflexive_and_non_transitive():
    m = KripkeModel.build(["a", "b", "c"], [[("a", "a"), ("b", "b"), ("a", "b"), ("b", "c")]], {})
    witnesses = {v.check: v.witness for v in validate_model(m).violations}
    assert witnesses["R_0 reflexive"] == ("c", "c")
    assert witnesses["R_0 transitive"] == ("a", "c")


def test_m1_valid(m1):
    assert validate_model(m1).ok
    assert m1.s_relation == m1.relations[0]


def test_construction_errors():
    with pytest.raises(ModelError):
        KripkeModel.build([], [[]], {})
    with pytest.raises(ModelError):
        KripkeModel.build(["a"], [[("a", "z")]], {})
    with pytest.raises(ModelError):
        KripkeModel.build(["a", "a"], [[]], {})


# -- transitive closure ----------------------------------------------------

def test_transitive_closure_small():
    assert transitive_closure([], "abc") == frozenset()
    assert transitive_closure([("a", "b"), ("b", "c")], "abc") == {("a", "b"), ("b", "c"), ("a", "c")}


@pytest.mark.parametrize("seed", range(20))
def test_transitive_closure_matches_naive(seed):
    rng = random.Random(seed)
    rel = {(a, b) for a in range(6) for b in range(6) if rng.random() < 0.2}
    tc = transitive_closure(rel, range(6))
    assert tc == naive_closure(rel, range(6))
    assert transitive_closure(tc, range(6)) == tc


# -- satisfaction ----------------------------------------------------------

def test_m1_values(m1):
    p = Var(0)
    assert not satisfies(m1, "w0", C(p))
    assert not satisfies(m1, "w1", Box(0, p))
    assert satisfies(m1, "w1", Box(1, TOP))
    assert satisfies_gfp(m1, C(p)) == frozenset()
    assert satisfies_gfp(m1, C(TOP)) == frozenset({0, 1})
    assert globally_true(m1, TOP)
    assert not globally_true(m1, p)
    assert globally_true(m1, Imp(Box(1, p), p))


def test_unknown_world(m1):
    with pytest.raises(ModelError):
        satisfies(m1, "w9", TOP)
    with pytest.raises(ModelError):
        satisfies(m1, 5, TOP)


def test_gfp_agrees_with_s_semantics():
    rng = random.Random(7)
    for _ in range(500):
        m = random_model(rng, max_worlds=5)
        f = random_formula(rng, max_depth=4)
        gfp = satisfies_gfp(m, f)
        assert gfp == frozenset(w for w in range(m.size) if satisfies(m, w, f)), f


def test_axioms_hold_in_random_models():
    rng = random.Random(11)
    for _ in range(60):
        m = random_model(rng, max_worlds=4)
        phi, psi = random_formula(rng, 2), random_formula(rng, 2)
        instances = list(schema_instances(phi, psi, 2).values()) + list(tautology_instances(phi, psi))
        for inst in instances:
            assert globally_true(m, inst), inst


def test_c_implies_e_and_ec():
    rng = random.Random(3)
    for _ in range(200):
        m = random_model(rng)
        f = random_formula(rng, 2)
        for w in range(m.size):
            if satisfies(m, w, C(f)):
                assert satisfies(m, w, e_op(f, 2))
                assert satisfies(m, w, e_op(C(f), 2))


def test_omega_rule_admissible_for_periodic_family():
    # phi_j alternates between two formulas; premises hold globally, so phi_0 -> C psi must too
    rng = random.Random(5)
    checked = 0
    for _ in range(400):
        m = random_model(rng, max_worlds=4)
        a, b, psi = (random_formula(rng, 2) for _ in range(3))
        fam = [a, b]
        prem = [Imp(fam[j], conj(e_op(psi, 2), e_op(fam[(j + 1) % 2], 2))) for j in range(2)]
        if all(globally_true(m, x) for x in prem):
            checked += 1
            assert globally_true(m, Imp(a, C(psi)))
    assert checked > 20


# -- refutation ------------------------------------------------------------

def test_refute_examples(m1):
    p = Var(0)
    assert refute_consequence([m1], [], [p], p) is None
    hit = refute_consequence([m1], [], [p], C(p))
    assert hit is not None and hit[1] == 0
    assert refute_consequence([m1], [p], [], C(p)) is None


def test_exhaustive_search_finds_minimal_countermodel():
    hit = exhaustive_counterexample([], [], parse("p0 -> C p0", 2), 2)
    assert hit is not None
    m, w = hit
    assert m.size == 2 and validate_model(m).ok
    assert not satisfies(m, w, parse("p0 -> C p0", 2))
    assert exhaustive_counterexample([], [], parse("C p0 -> p0", 2), 2, max_worlds=3) is None


def test_preorder_counts():
    # number of preorders on n labelled points
    assert [len(preorders(n)) for n in range(1, 5)] == [1, 4, 29, 355]
    # non-isomorphic preorders (one agent)
    assert [len(frames(n, 1)) for n in range(1, 5)] == [1, 3, 9, 33]


# -- file format -----------------------------------------------------------

def test_fixture_file_matches(m1):
    with open(FIXTURES / "m1.model") as fh:
        assert parse_model(fh.read()) == m1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_dump_parse_roundtrip(seed):
    m = random_model(random.Random(seed))
    back = parse_model(dump_model(m))
    assert back.worlds == m.worlds and back.relations == m.relations
    assert dict(back.valuation) == dict(m.valuation)


@pytest.mark.parametrize("text", [
    "worlds a\nrel 0: (a,a)\n",
    "agents 1\nworlds a\nrel 0 (a,a)\n",
    "agents 1\nworlds a\nrel 3: (a,a)\n",
    "agents 1\nworlds a\nfoo\n",
    "agents 1\nworlds a\nrel 0: (a,b)\n",
])
def test_bad_model_files(text):
    with pytest.raises(ModelError):
        parse_model(text)


def test_bot_never_holds(m1):
    assert satisfies_gfp(m1, BOT) == frozenset()
