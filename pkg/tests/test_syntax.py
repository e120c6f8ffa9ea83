import pytest
from hypothesis import given, settings

from s4ci.syntax import (BOT, TOP, Box, C, FormulaSyntaxError, Imp, Var, big_and, closure, conj,
                         depth, disj, e_op, iff, match_conj, match_e, neg, parse, render, size,
                         subformulas, variables)

from conftest import formulas


def test_e_expands_to_boxes_in_agent_order():
    assert parse("E p0", 2) == Imp(Imp(Box(0, Var(0)), Imp(Box(1, Var(0)), BOT)), BOT)
    assert e_op(Var(0), 1) == Box(0, Var(0))
    assert match_e(e_op(Var(3), 3), 3) == Var(3)
    assert match_e(Box(0, Var(0)), 2) is None


def test_abbreviations():
    p, q = Var(0), Var(1)
    assert parse("~p0", 1) == neg(p)
    assert parse("top", 1) == TOP == Imp(BOT, BOT)
    assert parse("p0 & p1", 1) == conj(p, q)
    assert parse("p0 | p1", 1) == disj(p, q)
    assert parse("p0 <-> p1", 1) == iff(p, q)
    assert match_conj(conj(p, q)) == (p, q)


def test_precedence_and_associativity():
    assert parse("p0 -> p1 -> p0", 1) == Imp(Var(0), Imp(Var(1), Var(0)))
    assert parse("p0 & p1 -> p0", 1) == Imp(conj(Var(0), Var(1)), Var(0))
    assert parse("box0 p0 -> p0", 1) == Imp(Box(0, Var(0)), Var(0))
    assert parse("C C p0", 1) == C(C(Var(0)))
    assert parse("~box1 (p0 | p1)", 2) == neg(Box(1, disj(Var(0), Var(1))))


@pytest.mark.parametrize("text", ["", "p0 ->", "(p0", "box2 p0", "box p0", "p0 p1", "q0", "p0 & & p1"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text, 2)


def test_error_carries_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("p0 -> ) p1", 2)
    assert info.value.pos == 6


def test_render_examples():
    assert render(Box(0, C(Var(1)))) == "box0 (C p1)"
    inst = Imp(conj(e_op(Var(0), 2), C(Imp(Var(0), e_op(Var(0), 2)))), C(Var(0)))
    assert render(inst, agent_count=2) == "(E p0 & C (p0 -> E p0)) -> C p0"
    assert render(Imp(conj(Var(0), Var(1)), BOT)) == "~(p0 & p1)"
    assert render(TOP, exact=True) == "bot -> bot"
    assert render(Imp(Var(0), Var(1)), unicode=True) == "p0 → p1"


@settings(max_examples=300, deadline=None)
@given(formulas(agents=3, n_vars=3, max_leaves=12))
def test_render_parse_roundtrip(f):
    assert parse(render(f), 3) == f
    assert parse(render(f, exact=True), 3) == f
    assert parse(render(f, agent_count=3), 3) == f


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_closure_properties(f):
    cl = closure(f, 2)
    assert subformulas(f) <= cl.formulas
    for g in cl.formulas:
        if isinstance(g, C):
            for i in range(2):
                assert Box(i, g.body) in cl and Box(i, g) in cl
        if isinstance(g, Imp):
            assert g.left in cl and g.right in cl
    order = cl.ordered()
    pos = {g: k for k, g in enumerate(order)}
    for g in order:
        if isinstance(g, Imp):
            assert pos[g.left] < pos[g] and pos[g.right] < pos[g]


def test_closure_counts():
    # C p0 with two agents: p0, C p0, box0 p0, box1 p0, box0 C p0, box1 C p0
    assert len(closure(C(Var(0)), 2)) == 6
    assert len(closure(Var(0), 2)) == 1


def test_measures():
    f = Imp(Box(0, Var(0)), C(Var(1)))
    assert size(f) == 5
    assert depth(f) == 2
    assert variables(f) == {0, 1}


def test_big_and_is_order_independent():
    a, b, c = Var(0), Box(0, Var(1)), C(Var(0))
    assert big_and([a, b, c]) == big_and([c, a, b, a])
    assert big_and([]) == TOP
    assert big_and([a]) == a


def test_closure_rejects_foreign_agents():
    with pytest.raises(ValueError):
        closure(Box(3, Var(0)), 2)


def test_grammar_examples():
    assert parse("C (p0 -> box1 p0)", 2) == C(Imp(Var(0), Box(1, Var(0))))
    assert render(BOT) == "bot"


def test_closure_of_c_single_agent():
    p = Var(0)
    assert closure(C(p), 1).formulas == {C(p), p, Box(0, p), Box(0, C(p))}


def test_closure_of_implication_two_agents():
    p, q = Var(0), Var(1)
    f = Imp(Box(0, p), C(q))
    expected = {Box(0, p), p, C(q), q, Box(0, q), Box(1, q), Box(0, C(q)), Box(1, C(q)), f}
    assert expected <= closure(f, 2).formulas


@settings(max_examples=150, deadline=None)
@given(formulas(agents=2, n_vars=3, max_leaves=10))
def test_closure_idempotent_and_linear(f):
    cl = closure(f, 2)
    for g in cl.formulas:
        assert closure(g, 2).formulas <= cl.formulas
    assert len(cl) <= (1 + 2 * 2) * len(subformulas(f))
