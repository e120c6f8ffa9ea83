import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from s4ci.corpus import algebra_corpus, fixture_a1, fixture_a2, random_formula
from s4ci.decide import decide_valid
from s4ci.prooftree import (SCHEMAS, Assumption, Axiom, CertificateSyntaxError, MP, Nec, OmegaLoop,
                            ProofRejected, TautologyCapExceeded, accepts, asm, assemble_global,
                            check, corrupted_checker, golden_certificates, is_instance, is_tautology,
                            match_axiom, mp, mutations, nec, nodes, read_certificate,
                            schema_instances, skeleton_atoms, soundness_sweep, taut,
                            tautology_instances, unfold_depth, unroll, write_certificate)
from s4ci.syntax import BOT, TOP, Box, C, Imp, Var, big_and, conj, e_op, parse, variables

P, Q = Var(0), Var(1)
GOLDEN = golden_certificates(2)
ALGEBRAS = algebra_corpus(seed=50, count=120, max_points=3)


def brute_tautology(f) -> bool:
    atoms = skeleton_atoms(f)

    def ev(g, val):
        if g == BOT:
            return False
        if g in val:
            return val[g]
        return (not ev(g.left, val)) or ev(g.right, val)

    return all(ev(f, dict(zip(atoms, bits))) for bits in itertools.product([False, True], repeat=len(atoms)))


# -- axiom recognition -----------------------------------------------------

def test_match_axiom_examples():
    assert match_axiom(parse("box0 (p0 -> p1) -> box0 p0 -> box0 p1", 2), 2) == "ii"
    assert match_axiom(parse("E p0 & C (p0 -> E p0) -> C p0", 2), 2) == "viii"
    assert match_axiom(parse("p0 -> C p0", 2), 2) is None
    assert match_axiom(parse("p0 -> p1 -> p0", 2), 2) == "i"
    assert not decide_valid(parse("p0 -> C p0", 2), 2).valid


def test_every_schema_instance_is_recognised():
    rng = random.Random(51)
    for _ in range(100):
        phi, psi = random_formula(rng, 2), random_formula(rng, 2)
        for name, inst in schema_instances(phi, psi, 2).items():
            assert is_instance(inst, name, 2), (name, inst)
            assert match_axiom(inst, 2) is not None
        for inst in tautology_instances(phi, psi):
            assert is_instance(inst, "i", 2)


def test_no_schema_vii():
    assert "vii" not in SCHEMAS
    with pytest.raises(ProofRejected):
        check(Axiom("vii", TOP), [], 2)


def test_e_patterns_respect_agent_count():
    inst = Imp(C(P), conj(e_op(P, 3), e_op(C(P), 3)))
    assert is_instance(inst, "vi", 3)
    assert not is_instance(inst, "vi", 2)


def test_skeleton_atoms():
    f = Imp(Box(0, P), Imp(C(Q), Imp(P, Box(0, P))))
    assert skeleton_atoms(f) == [Box(0, P), C(Q), P]


@settings(max_examples=300, deadline=None)
@given(st.recursive(st.one_of(st.just(BOT), st.integers(0, 2).map(Var), st.integers(0, 1).map(lambda k: C(Var(k)))),
                    lambda ch: st.tuples(ch, ch).map(lambda p: Imp(*p)), max_leaves=10))
def test_tautology_check_matches_brute_force(f):
    assert is_tautology(f) == brute_tautology(f)


def test_tautologies_are_valid_modal_formulas():
    rng = random.Random(52)
    for _ in range(80):
        f = random_formula(rng, 3)
        if is_tautology(f):
            assert decide_valid(f, 2, cap_closure=64).valid


def test_tautology_cap():
    f = big_and([Var(k) for k in range(17)])
    with pytest.raises(TautologyCapExceeded):
        is_tautology(Imp(f, f))
    with pytest.raises(ProofRejected):
        check(Axiom("i", Imp(f, f)), [], 2)


# -- checking --------------------------------------------------------------

def test_nec_over_assumption():
    out = check(Nec(Assumption(P), C(P)), [P], 2)
    assert out.conclusion == C(P) and out.assumptions_used == {P}


def test_top_omega_certificate():
    g = next(g for g in GOLDEN if g.name == "top-implies-c-top")
    assert g.cert.psi == TOP and g.cert.loop_index == 0 and len(g.cert.premises) == 1
    out = check(g.cert, [], 2)
    assert out.conclusion == Imp(TOP, C(TOP)) and out.assumptions_used == frozenset()


@pytest.mark.parametrize("g", GOLDEN, ids=lambda g: g.name)
def test_golden_certificates(g):
    out = check(g.cert, g.sigma, 2)
    assert out.assumptions_used <= set(g.sigma)
    # assumption leaves are exactly those reported
    leaves = {n.formula for _, n in nodes(g.cert) if isinstance(n, Assumption)}
    assert leaves == out.assumptions_used
    if not g.sigma:
        assert decide_valid(out.conclusion, 2, cap_closure=64).valid


def test_expected_conclusions():
    concl = {g.name: check(g.cert, g.sigma, 2).conclusion for g in GOLDEN}
    assert concl["induction-by-omega"] == Imp(P, C(P))
    assert concl["c-reflexive"] == Imp(C(P), P)
    assert concl["c-transitive"] == Imp(C(P), C(C(P)))
    assert concl["box-box-from-assumption"] == Box(0, Box(1, P))
    assert concl["period-two-lasso"] == Imp(P, C(TOP))


def test_assumption_outside_sigma():
    with pytest.raises(ProofRejected) as info:
        check(nec(asm(P)), [Q], 2)
    assert info.value.path == ("child",)


def test_mp_mismatch_reports_expected_and_found():
    bad = MP(taut(Imp(P, Imp(Q, P))), asm(Q), Imp(Q, P))
    with pytest.raises(ProofRejected) as info:
        check(bad, [Q], 2)
    assert info.value.path == ()
    assert info.value.expected == Imp(Q, Imp(Q, P))
    assert info.value.found == Imp(P, Imp(Q, P))


def test_omega_loop_index_range():
    g = next(g for g in GOLDEN if g.name == "top-implies-c-top").cert
    bad = OmegaLoop(g.psi, g.premises, 1, g.conclusion)
    with pytest.raises(ProofRejected):
        check(bad, [], 2)
    with pytest.raises(ProofRejected):
        check(OmegaLoop(g.psi, (), 0, g.conclusion), [], 2)


def test_builders_refuse_nonsense():
    with pytest.raises(ValueError):
        mp(asm(P), asm(Q))
    with pytest.raises(ValueError):
        taut(P)


# -- mutation testing ------------------------------------------------------

@pytest.mark.parametrize("g", GOLDEN, ids=lambda g: g.name)
def test_every_mutation_rejected_at_its_node(g):
    count = 0
    for path, field, mutant in mutations(g.cert):
        count += 1
        with pytest.raises(ProofRejected) as info:
            check(mutant, g.sigma, 2)
        # the failure is at the mutated node or at the parent that consumes it
        assert info.value.path in (path, path[:-1]), (path, field, info.value)
    assert count >= 1


# -- lassos ----------------------------------------------------------------

def _dummy_loop(k: int, loop: int) -> OmegaLoop:
    prem = tuple(Assumption(Var(j)) for j in range(k))
    return OmegaLoop(TOP, prem, loop, TOP)


def test_unfold_depth_examples():
    assert unfold_depth(_dummy_loop(1, 0), 5) == Var(0)
    two = _dummy_loop(2, 1)
    assert unfold_depth(two, 0) == Var(0)
    assert unfold_depth(two, 7) == Var(1)
    three = _dummy_loop(4, 1)
    assert [unfold_depth(three, j) for j in range(8)] == [Var(k) for k in (0, 1, 2, 3, 1, 2, 3, 1)]
    with pytest.raises(TypeError):
        unfold_depth(asm(P), 0)


def test_lasso_premises_on_golden():
    lasso = next(g for g in GOLDEN if g.name == "period-two-lasso").cert
    e = lambda f: e_op(f, 2)
    refl = Imp(Q, Q)
    assert unfold_depth(lasso, 0) == Imp(P, conj(e(TOP), e(TOP)))
    assert unfold_depth(lasso, 1) == Imp(TOP, conj(e(TOP), e(refl)))
    assert unfold_depth(lasso, 2) == Imp(refl, conj(e(TOP), e(TOP)))
    assert unfold_depth(lasso, 3) == unfold_depth(lasso, 1)


@pytest.mark.parametrize("m", range(6))
def test_unrolling_is_stable(m):
    for g in GOLDEN:
        a = check(g.cert, g.sigma, 2)
        b = check(unroll(g.cert, m), g.sigma, 2)
        assert a == b
        for path, _, mutant in itertools.islice(mutations(g.cert), 5):
            assert accepts(unroll(mutant, m), g.sigma, 2) is False


# -- soundness sweep -------------------------------------------------------

@pytest.mark.parametrize("g", GOLDEN, ids=lambda g: g.name)
def test_sweep_passes_on_golden(g):
    algs = [fixture_a1(), fixture_a2()] + ALGEBRAS
    assert soundness_sweep(g.cert, g.sigma, algs, 2).ok


def test_corrupted_checker_is_caught():
    bogus = Axiom("i", Imp(P, C(P)))
    assert not accepts(bogus, [], 2)
    report = soundness_sweep(bogus, [], ALGEBRAS, 2, checker=corrupted_checker)
    assert not report.ok
    # a global premise p0 does not yield p1
    bogus = MP(Axiom("i", Imp(P, Q)), Assumption(P), Q)
    assert not accepts(bogus, [P], 2)
    assert not soundness_sweep(bogus, [P], ALGEBRAS, 2, checker=corrupted_checker).ok


def test_sweep_skips_other_agent_counts():
    one_agent = [a for a in ALGEBRAS if a.agents == 1]
    bogus = Axiom("i", Imp(P, C(P)))
    assert soundness_sweep(bogus, [], one_agent, 2, checker=corrupted_checker).ok


# -- assembling global derivations -----------------------------------------

@pytest.mark.parametrize("sigma", [[P], [P, Q], [Q, P, Imp(P, Q)]])
def test_assemble_global(sigma):
    target = C(big_and(sigma))
    cert = assemble_global(sigma, target, taut(Imp(target, target)), 2)
    out = check(cert, sigma, 2)
    assert out.conclusion == target and out.assumptions_used == set(sigma)
    assert soundness_sweep(cert, sigma, ALGEBRAS[:40], 2).ok


def test_assemble_global_without_premises():
    proof = taut(Imp(P, P))
    assert assemble_global([], Imp(P, P), proof, 2) is proof
    with pytest.raises(ValueError):
        assemble_global([P], Q, proof, 2)


# -- s-expressions ---------------------------------------------------------

@pytest.mark.parametrize("g", GOLDEN, ids=lambda g: g.name)
def test_sexp_roundtrip(g):
    text = write_certificate(g.cert)
    assert read_certificate(text, 2) == g.cert


def test_read_small_certificate():
    cert = read_certificate('(nec (asm "p0") "C p0")', 2)
    assert cert == Nec(Assumption(P), C(P))
    cert = read_certificate('(mp (ax iv "box0 p0 -> p0") (asm "box0 p0") "p0")', 2)
    assert check(cert, [Box(0, P)], 2).conclusion == P


@pytest.mark.parametrize("text", [
    '(nec (asm "p0") "C p0"',
    '(nec (asm "p0") "C p0"))',
    '(frob "p0")',
    '(asm p0)',
    '(asm "p0 ->")',
    '(nec (asm "p0"))',
    '(omega "top" (asm "p0") 0 "top")',
    '(omega "top" ((asm "p0")) x "top")',
    '(asm "p0") (asm "p1")',
])
def test_bad_certificates(text):
    with pytest.raises(CertificateSyntaxError):
        read_certificate(text, 2)


def test_sweep_uses_all_variables():
    g = next(g for g in GOLDEN if g.name == "induction-by-omega")
    assert variables(check(g.cert, g.sigma, 2).conclusion) == {0}
