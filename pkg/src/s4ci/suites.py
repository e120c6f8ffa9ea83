"""Property suites run by the acceptance tests and by ``s4ci suite``.

Each suite returns a SuiteResult carrying a pass flag, a count of checked
items, the first few failures and the wall time against its budget.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import all_assignments, check_standard_sigma, evaluate_batch, gfp_ce, validate_algebra
from .corpus import algebra_corpus, fixture_a1, fixture_a2, random_formula, space_corpus
from .decide import DEFAULT_CAP_SETS, derives_mixed, decide_valid, ResourceCapExceeded
from .kripke import exhaustive_counterexample, globally_true, satisfies
from .prooftree import (accepts, check, golden_certificates, mutations, schema_instances,
                        soundness_sweep, tautology_instances)
from .stone import (algebra_to_topologies, model_algebra, powerset_algebra, ultrafilters,
                    verify_representation)
from .syntax import Formula, big_and, closure, render
from . import wellfound
from .wellfound import INF

# closure bound for suite queries: axiom instances over depth-3 formulas and
# the combined queries of the triple corpus both exceed the interactive default
SUITE_CAP_CLOSURE = 64


@dataclass
class SuiteResult:
    number: int
    name: str
    budget: float
    checked: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    notes: str = ""

    @property
    def passed(self) -> bool:
        return not self.failures and self.seconds < self.budget

    def fail(self, what) -> None:
        if len(self.failures) < 20:
            self.failures.append(what)
        else:
            self.failures[-1] = "... more failures"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        if self.seconds >= self.budget:
            extra += f"; over budget {self.budget:.0f}s"
        return (f"[{status}] {self.number}. {self.name}: {self.checked} checks in "
                f"{self.seconds:.1f}s{extra}")

    def record(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "checked": self.checked, "seconds": round(self.seconds, 3),
                "budget": self.budget, "failures": [str(f) for f in self.failures],
                "notes": self.notes}


def _timed(number: int, name: str, budget: float):
    def wrap(fn: Callable[..., SuiteResult]):
        def run(seed: int = 0, **kw) -> SuiteResult:
            res = SuiteResult(number, name, budget)
            t0 = time.perf_counter()
            fn(res, seed, **kw)
            res.seconds = time.perf_counter() - t0
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.number = number
        return run
    return wrap


def corpus(seed: int = 0) -> list:
    """All powerset algebras of the 200 random spaces (|X| <= 4, up to 3 agents) plus A1 and A2."""
    return algebra_corpus(seed, count=200, max_points=4, agent_counts=(1, 2, 3), unique=False)


def unique_corpus(seed: int = 0) -> list:
    return algebra_corpus(seed, count=200, max_points=4, agent_counts=(1, 2, 3), unique=True)


# -- 1 ----------------------------------------------------------------------

@_timed(1, "greatest fixpoint of z -> E a & E z equals C a", 10)
def fixed_point_suite(res: SuiteResult, seed: int) -> None:
    for A in corpus(seed):
        if not validate_algebra(A).ok:
            res.fail(f"corpus algebra {A.atoms} is invalid")
            continue
        for a in A.elements:
            res.checked += 1
            if gfp_ce(A, a) != A.cop(a):
                res.fail((A.atoms, A.name(a)))


# -- 2 ----------------------------------------------------------------------

@_timed(2, "topological powerset algebras validate and round-trip", 10)
def topology_suite(res: SuiteResult, seed: int) -> None:
    for space in space_corpus(seed, 200, 4, (1, 2, 3)):
        A = powerset_algebra(space)
        rep = validate_algebra(A)
        res.checked += 1
        if not rep.ok:
            res.fail(f"{space.points}: {rep.lines()[0]}")
            continue
        back = algebra_to_topologies(A)
        res.checked += 1
        if powerset_algebra(back) != A:
            res.fail(f"{space.points}: algebra round trip")
        if tuple(t.opens for t in back.topologies) != tuple(t.opens for t in space.topologies):
            res.fail(f"{space.points}: topologies not recovered")
    for A in (fixture_a1(), fixture_a2()):
        res.checked += 1
        if powerset_algebra(algebra_to_topologies(A)) != A:
            res.fail(f"fixture {A.atoms} round trip")


# -- 3 ----------------------------------------------------------------------

@_timed(3, "finite algebras are standard; accessible part is {a | a not below C d}", 30)
def standard_suite(res: SuiteResult, seed: int) -> None:
    for A in unique_corpus(seed):
        if A.size > 16:
            continue
        sr = wellfound.check_standard(A)
        res.checked += 1
        if not sr.standard:
            res.fail(f"{A.atoms}: witness {sr.witness}")
        for d in A.elements:
            acc = wellfound.accessible_part(wellfound.build_prec(A, d))
            want = frozenset(a for a in A.elements if not A.leq(a, A.cop(d)))
            res.checked += 1
            if acc != want:
                res.fail((A.atoms, A.name(d)))
        res.checked += 1
        if not check_standard_sigma(A):
            res.fail(f"{A.atoms}: completeness argument disagrees")


# -- 4 ----------------------------------------------------------------------

@_timed(4, "height laws and ideals M_d(gamma)", 60)
def height_suite(res: SuiteResult, seed: int) -> None:
    for A in unique_corpus(seed):
        if A.size > 16:
            continue
        el = np.arange(A.size)
        for d in A.elements:
            hm = wellfound.heights(wellfound.build_prec(A, d))
            h = np.array([hm[a] for a in A.elements], dtype=float)
            join = el[:, None] | el[None, :]
            res.checked += A.size * A.size
            bad = np.argwhere(h[join] != np.minimum(h[:, None], h[None, :]))
            for c, e in bad[:1]:
                res.fail(f"{A.atoms} d={A.name(d)}: ht({A.name(c)} | {A.name(e)})")
            ed = A.e(d)
            step = np.array([hm[ed & A.e(c)] for c in A.elements], dtype=float)
            res.checked += A.size
            for c in np.nonzero(~(h + 1 <= step))[0][:1]:
                res.fail(f"{A.atoms} d={A.name(d)}: ht({A.name(c)}) + 1 > ht(E d & E c)")
            finite = [x for x in hm.heights.values() if x != INF]
            for gamma in list(range(max(finite, default=0) + 2)) + [INF]:
                res.checked += 1
                prob = wellfound.ideal_problem(A, wellfound.m_ideal(A, d, gamma))
                if prob:
                    res.fail(f"{A.atoms} d={A.name(d)} gamma={gamma}: {prob}")


# -- 5 ----------------------------------------------------------------------

@_timed(5, "representation over ultrafilters and the rank hierarchy", 60)
def representation_suite(res: SuiteResult, seed: int) -> None:
    for A in unique_corpus(seed):
        rep = verify_representation(A)
        res.checked += 1
        if not rep.ok:
            res.fail(f"{A.atoms}: {rep.lines()[0]}")
        ults = ultrafilters(A)
        for d in A.elements:
            table = wellfound.RankTable(A, d, ults)
            for u, rk in zip(ults, table.ranks):
                for gamma in range(table.algebra_height + 2):
                    res.checked += 1
                    meets = any(a in u for a in wellfound.m_ideal(A, d, gamma))
                    if (gamma < rk) != meets:
                        res.fail(f"{A.atoms} d={A.name(d)} u={A.name(u.generator)} gamma={gamma}")


# -- 6 ----------------------------------------------------------------------

FIXED_VALID = ("C p0 -> p0", "C p0 -> C C p0")
FIXED_INVALID = ("p0 -> C p0", "E p0 -> C p0", "box0 p0 -> box1 p0")


@_timed(6, "decision procedure on axiom instances and fixed formulas", 120)
def decide_suite(res: SuiteResult, seed: int, count: int = 500) -> None:
    from .syntax import parse

    rng = random.Random(seed)
    forms = [random_formula(rng, 3, 2, 2) for _ in range(count)]
    for k, phi in enumerate(forms):
        psi = forms[(k + 1) % count]
        cases = list(schema_instances(phi, psi, 2).items())
        cases += [("i", t) for t in tautology_instances(phi, psi)]
        for schema, inst in cases:
            res.checked += 1
            try:
                r = decide_valid(inst, 2, cap_closure=SUITE_CAP_CLOSURE)
            except ResourceCapExceeded as exc:
                res.fail(f"({schema}) {render(inst, agent_count=2)}: {exc}")
                continue
            if not r.valid:
                res.fail(f"({schema}) judged invalid: {render(inst, agent_count=2)}")
    for text in FIXED_VALID:
        res.checked += 1
        if not decide_valid(parse(text, 2), 2).valid:
            res.fail(f"{text} judged invalid")
    for text in FIXED_INVALID:
        res.checked += 1
        f = parse(text, 2)
        r = decide_valid(f, 2)
        if r.valid:
            res.fail(f"{text} judged valid")
        elif satisfies(r.countermodel, r.world, f):
            res.fail(f"{text}: countermodel does not refute")


# -- 7 ----------------------------------------------------------------------

@_timed(7, "golden certificates are sound in every corpus algebra", 60)
def soundness_suite(res: SuiteResult, seed: int) -> None:
    algs = [A for A in unique_corpus(seed) if A.agents == 2 and A.size <= 16]
    res.notes = f"{len(algs)} two-agent algebras"
    for g in golden_certificates(2):
        rep = soundness_sweep(g.cert, g.sigma, algs, 2)
        res.checked += len(algs)
        if not rep.ok:
            res.fail(f"{g.name}: {rep.lines()[0]}")


# -- 8 ----------------------------------------------------------------------

@dataclass(frozen=True)
class Triple:
    sigma: tuple
    gamma: tuple
    f: Formula

    def show(self) -> str:
        s = ", ".join(render(x, agent_count=2) for x in self.sigma)
        g = ", ".join(render(x, agent_count=2) for x in self.gamma)
        return f"{{{s}}}; {{{g}}} |- {render(self.f, agent_count=2)}"


def triple_corpus(seed: int = 0, count: int = 100, bound: int = 8) -> list[Triple]:
    """Random (sigma, gamma, f) with every formula's closure at most ``bound``; deduplicated."""
    rng = random.Random(seed)

    def small() -> Formula:
        while True:
            g = random_formula(rng, 3, 2, 2)
            if len(closure(g, 2)) <= bound:
                return g

    out: list[Triple] = []
    seen = set()
    while len(out) < count:
        t = Triple(tuple(small() for _ in range(rng.randint(0, 2))),
                   tuple(small() for _ in range(rng.randint(0, 2))), small())
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def algebraic_counterexample(algs, t: Triple):
    """First (algebra, valuation) where sigma is all-1 and the meet of gamma is not below f."""
    from .syntax import variables

    var_ids = sorted(set().union(variables(t.f), *(variables(x) for x in t.sigma + t.gamma)))
    groups: dict[int, list] = {}
    for A in algs:
        groups.setdefault(A.size, []).append(A)
    s_all, g_all = big_and(t.sigma), big_and(t.gamma)
    for size, group in sorted(groups.items()):
        boxes = np.stack([A.box_array for A in group])
        cop = np.stack([A.c_array for A in group])
        top = np.array([A.top for A in group])
        assign = all_assignments(size, var_ids) if var_ids else {}
        sv = evaluate_batch(boxes, cop, top, assign, s_all)
        gv = evaluate_batch(boxes, cop, top, assign, g_all)
        fv = evaluate_batch(boxes, cop, top, assign, t.f)
        bad = (sv == top[:, None]) & ((gv & ~fv & top[:, None]) != 0)
        hits = np.argwhere(bad)
        if hits.size:
            ai, vi = (int(x) for x in hits[0])
            return group[ai], {v: int(assign[v][vi]) for v in var_ids}
    return None


def _algebra_refutes(A, valuation: dict, t: Triple) -> bool:
    from .algebra import Valuation, algebraic_consequence

    chk = algebraic_consequence(A, Valuation(A, valuation), t.sigma, t.gamma, t.f)
    return not chk.holds


@_timed(8, "proof, Kripke and algebraic consequence agree on random triples", 600)
def consistency_suite(res: SuiteResult, seed: int, count: int = 100) -> None:
    algs = [A for A in unique_corpus(seed) if A.agents == 2]
    triples = triple_corpus(seed, count)
    valid = 0
    for t in triples:
        res.checked += 1
        try:
            r = derives_mixed(t.sigma, t.gamma, t.f, 2, cap_closure=SUITE_CAP_CLOSURE)
        except ResourceCapExceeded as exc:
            res.fail(f"{t.show()}: {exc}")
            continue
        if r.valid:
            valid += 1
            ce = exhaustive_counterexample(t.sigma, t.gamma, t.f, 2, max_worlds=4)
            if ce is not None:
                res.fail(f"derivable but Kripke-refuted: {t.show()}")
            if algebraic_counterexample(algs, t) is not None:
                res.fail(f"derivable but algebraically refuted: {t.show()}")
            continue
        m, w = r.countermodel, r.world
        if not (all(globally_true(m, x) for x in t.sigma)
                and all(satisfies(m, w, x) for x in t.gamma) and not satisfies(m, w, t.f)):
            res.fail(f"countermodel is not a semantic counterexample: {t.show()}")
            continue
        P = model_algebra(m)
        val = {v: sum(1 << x for x in ws) for v, ws in m.valuation.items()}
        from .syntax import variables
        for v in set().union(variables(t.f), *(variables(x) for x in t.sigma + t.gamma)):
            val.setdefault(v, 0)
        if not _algebra_refutes(P, val, t):
            res.fail(f"powerset algebra of the countermodel is not a counterexample: {t.show()}")
    res.notes = f"{valid} derivable, {len(triples) - valid} refuted"


# -- 9 ----------------------------------------------------------------------

@_timed(9, "assumption-free certificates decide valid; all mutations rejected", 60)
def certificate_suite(res: SuiteResult, seed: int) -> None:
    killed = total = 0
    for g in golden_certificates(2):
        out = check(g.cert, g.sigma, 2)
        if not out.assumptions_used:
            res.checked += 1
            if not decide_valid(out.conclusion, 2, cap_sets=DEFAULT_CAP_SETS).valid:
                res.fail(f"{g.name}: conclusion not valid")
        for path, fld, mutant in mutations(g.cert):
            total += 1
            res.checked += 1
            if accepts(mutant, g.sigma, 2):
                res.fail(f"{g.name}: mutant at {'/'.join(path) or 'root'}.{fld} accepted")
            else:
                killed += 1
    res.notes = f"mutation kill {killed}/{total}"


SUITES = (fixed_point_suite, topology_suite, standard_suite, height_suite, representation_suite,
          decide_suite, soundness_suite, consistency_suite, certificate_suite)


def run_all(seed: int = 0, only=None) -> list[SuiteResult]:
    return [s(seed) for s in SUITES if only is None or s.number in only]
