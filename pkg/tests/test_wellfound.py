import itertools
from dataclasses import replace
from functools import lru_cache

import networkx as nx
import pytest

from s4ci.corpus import algebra_corpus
from s4ci.stone import ultrafilters
from s4ci.wellfound import (INF, Lasso, accessible_part, algebra_height, build_prec, check_standard,
                            heights, ideal_problem, j_set, lasso_ok, m_ideal, node_heights,
                            product_preds, rank_ultrafilter)

A, B = 0b01, 0b10


def scc_inaccessible(g) -> set:
    """Nodes from which a cycle can be reached by walking to predecessors."""
    down = nx.DiGraph()
    down.add_nodes_from(g.nodes)
    down.add_edges_from((b, a) for a, b in g.edges)
    cyclic = set()
    for comp in nx.strongly_connected_components(down):
        node = next(iter(comp))
        if len(comp) > 1 or down.has_edge(node, node):
            cyclic |= comp
    out = set()
    for x in g.nodes:
        if cyclic & (nx.descendants(down, x) | {x}):
            out.add(x)
    return out


def recursive_heights(g) -> dict:
    bad = scc_inaccessible(g)

    @lru_cache(maxsize=None)
    def ht(a):
        if a in bad:
            return INF
        return max((ht(b) + 1 for b in g.preds[a]), default=0)

    return {a: ht(a) for a in g.nodes}


CORPUS = algebra_corpus(seed=21, count=120, max_points=3)


# -- edges -----------------------------------------------------------------

def test_edges_examples(a1, a2):
    assert build_prec(a1, 0).edges == {(a, 0) for a in a1.elements}
    assert build_prec(a2, A).edges == {(a, 0) for a in a2.elements}
    g = build_prec(a2, a2.top)
    assert (a2.top, a2.top) in g.edges and (A, 0) in g.edges
    assert g.edges == {(a, b) for a in a2.elements for b in a2.elements if a2.leq(b, a2.e(a))}


# -- accessible part -------------------------------------------------------

def test_accessible_examples(a1, a2):
    assert accessible_part(build_prec(a2, A)) == {A, B, a2.top}
    assert accessible_part(build_prec(a1, a1.top)) == frozenset()


@pytest.mark.parametrize("alg", CORPUS, ids=lambda a: f"{len(a.atoms)}x{a.agents}")
def test_accessible_matches_scc_oracle_and_characterization(alg):
    for d in alg.elements:
        g = build_prec(alg, d)
        acc = accessible_part(g)
        assert acc == set(g.nodes) - scc_inaccessible(g)
        assert acc == {a for a in alg.elements if not alg.leq(a, alg.cop(d))}


# -- heights ---------------------------------------------------------------

def test_height_examples(a2):
    hm = heights(build_prec(a2, A))
    assert [hm[a] for a in (A, B, a2.top)] == [0, 0, 0]
    assert hm[0] == INF
    assert INF + 1 == INF


def test_product_height_is_min(a2):
    preds = build_prec(a2, A).preds
    prod = product_preds(preds, preds)
    ht = node_heights(list(prod), prod)
    single = heights(build_prec(a2, A))
    assert ht[(A, 0)] == 0
    for c, e in prod:
        assert ht[(c, e)] == min(single[c], single[e])


def test_join_map_never_lowers_height(a2):
    preds = build_prec(a2, A).preds
    prod = product_preds(preds, preds)
    ht = node_heights(list(prod), prod)
    single = heights(build_prec(a2, A))
    for c, e in prod:
        assert ht[(c, e)] <= single[c | e]


def test_heights_match_recursive_oracle():
    for alg in CORPUS[:60]:
        for d in alg.elements:
            g = build_prec(alg, d)
            assert heights(g).heights == recursive_heights(g)


def test_height_laws():
    for alg in CORPUS[:60]:
        for d in alg.elements:
            hm = heights(build_prec(alg, d))
            ed = alg.e(d)
            for c, e in itertools.product(alg.elements, repeat=2):
                assert hm[c | e] == min(hm[c], hm[e])
            for c in alg.elements:
                assert hm[c] + 1 <= hm[ed & alg.e(c)]
            assert algebra_height(alg, d) <= alg.size


# -- ideals ----------------------------------------------------------------

def test_ideal_examples(a2):
    assert m_ideal(a2, A, 0) == set(a2.elements)
    assert m_ideal(a2, A, 1) == {0}
    assert m_ideal(a2, A, INF) == {0}


def test_ideals_are_ideals_and_antitone():
    for alg in CORPUS[:60]:
        for d in alg.elements:
            top = algebra_height(alg, d)
            prev = set(alg.elements)
            for gamma in list(range(top + 2)) + [INF]:
                S = m_ideal(alg, d, gamma)
                assert ideal_problem(alg, S) is None
                assert S <= prev
                prev = S
            assert m_ideal(alg, d, INF) == {a for a in alg.elements if alg.leq(a, alg.cop(d))}


def test_ideal_problem_detects_gaps(a2):
    assert ideal_problem(a2, frozenset({A, B})) == "0 missing"
    assert ideal_problem(a2, frozenset({0, A, B})) is not None


# -- standardness ----------------------------------------------------------

def test_fixtures_standard(a1, a2):
    assert check_standard(a1).standard
    res = check_standard(a2)
    assert res.standard and res.witness is None
    assert len(res.per_d) == 4


def test_every_valid_finite_algebra_is_standard():
    assert all(check_standard(alg).standard for alg in CORPUS)


def test_broken_c_yields_lasso_witness(a2):
    # C = 0 everywhere: 1 < 1 is a cycle under d = 1 but 1 is not below C 1
    bad = replace(a2, c=(0, 0, 0, 0))
    res = check_standard(bad)
    assert not res.standard
    w = res.witness
    assert isinstance(w, Lasso) and lasso_ok(bad, w)
    assert not bad.leq(w.sequence[0], bad.cop(w.d))
    # starts at the least bad element alpha, then loops on 1
    assert w.d == bad.top and w.sequence == (A, bad.top) and w.loop == 1


def test_oversized_c_fails_without_lasso(a2):
    res = check_standard(replace(a2, c=tuple(a2.elements)))
    assert not res.standard and res.witness is None


def test_lasso_ok_rejects_bad_sequence(a2):
    assert not lasso_ok(a2, Lasso(A, (a2.top,), 0))


# -- ranks and J sets ------------------------------------------------------

def test_rank_examples(a2):
    ults = {u.generator: u for u in ultrafilters(a2)}
    assert rank_ultrafilter(a2, A, ults[B]) == 1
    assert all(rank_ultrafilter(a2, a2.top, u) == INF for u in ults.values())


def test_rank_rejects_non_ultrafilter(a2):
    from s4ci.stone import Ultrafilter
    with pytest.raises(ValueError):
        rank_ultrafilter(a2, A, Ultrafilter(0, frozenset(a2.elements)))


def test_rank_equivalence_everywhere():
    for alg in CORPUS[:60]:
        ults = ultrafilters(alg)
        for d in alg.elements:
            top = algebra_height(alg, d)
            for u in ults:
                rk = rank_ultrafilter(alg, d, u)
                for gamma in range(top + 2):
                    meets = any(a in u for a in m_ideal(alg, d, gamma))
                    assert (gamma < rk) == meets


def test_j_set_examples(a2):
    assert len(j_set(a2, A, 0)) == 2
    assert j_set(a2, A, 2) == []
    assert len(j_set(a2, a2.top, INF)) == 2


def test_j_sets_antitone_and_limit():
    for alg in CORPUS[:40]:
        ults = ultrafilters(alg)
        for d in alg.elements:
            levels = [j_set(alg, d, g) for g in range(algebra_height(alg, d) + 2)]
            assert levels[0] == ults
            for hi, lo in zip(levels[1:], levels):
                assert set(u.generator for u in hi) <= set(u.generator for u in lo)
            inf = {u.generator for u in j_set(alg, d, INF)}
            assert inf == {u.generator for u in ults if alg.cop(d) in u}
