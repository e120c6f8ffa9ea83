"""Named fixtures and seeded random generators for spaces, algebras, models and formulas."""

from __future__ import annotations

import random
from typing import Iterator

from .algebra import FiniteAlgebra
from .kripke import KripkeModel, transitive_closure
from .stone import FiniteTopSpace, powerset_algebra
from .syntax import BOT, Box, C, Formula, Imp, Var, closure

A = 0b01  # atom alpha
B = 0b10  # atom beta


def fixture_a1() -> FiniteAlgebra:
    """One atom, two agents, every operator the identity."""
    ident = (0, 1)
    return FiniteAlgebra(("a",), (ident, ident), ident)


def fixture_a2() -> FiniteAlgebra:
    """Atoms a, b; box0 opens {0, a, 1}; box1 opens {0, b, 1}; C opens {0, 1}."""
    return FiniteAlgebra.from_opens(("a", "b"), [(0, A, A | B), (0, B, A | B)], (0, A | B))


def fixture_a2_space() -> FiniteTopSpace:
    return FiniteTopSpace.from_basic_opens(("a", "b"), [[A], [B]])


def fixture_m1() -> KripkeModel:
    """w0 sees w1 for agent 0 only; p0 holds at w0 alone."""
    return KripkeModel.build(
        ("w0", "w1"),
        [[("w0", "w0"), ("w1", "w1"), ("w0", "w1")], [("w0", "w0"), ("w1", "w1")]],
        {0: ["w0"]},
    )


FIXTURES = {
    "a1": fixture_a1,
    "a2": fixture_a2,
    "a2-space": fixture_a2_space,
    "m1": fixture_m1,
}


def load_fixture(name: str):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None


# -- random structures -----------------------------------------------------

def random_space(rng: random.Random, max_points: int = 4, agents: int = 2) -> FiniteTopSpace:
    n = rng.randint(1, max_points)
    full = (1 << n) - 1
    opens = []
    for _ in range(agents):
        k = rng.randint(0, 3)
        opens.append([rng.randint(0, full) for _ in range(k)])
    return FiniteTopSpace.from_basic_opens(tuple(f"x{k}" for k in range(n)), opens)


def space_corpus(seed: int = 0, count: int = 200, max_points: int = 4,
                 agent_counts: tuple[int, ...] = (1, 2, 3)) -> list[FiniteTopSpace]:
    rng = random.Random(seed)
    return [random_space(rng, max_points, rng.choice(agent_counts)) for _ in range(count)]


def algebra_corpus(seed: int = 0, count: int = 200, max_points: int = 4,
                   agent_counts: tuple[int, ...] = (1, 2, 3), fixtures: bool = True,
                   unique: bool = True) -> list[FiniteAlgebra]:
    """Powerset algebras of random multitopological spaces, plus A1 and A2.

    With ``unique`` the structurally repeated algebras are dropped, keeping
    first occurrences in generation order.
    """
    out = [fixture_a1(), fixture_a2()] if fixtures else []
    out += [powerset_algebra(s) for s in space_corpus(seed, count, max_points, agent_counts)]
    if unique:
        seen = set()
        kept = []
        for a in out:
            key = (len(a.atoms), a.boxes, a.c)
            if key not in seen:
                seen.add(key)
                kept.append(a)
        out = kept
    return out


def random_model(rng: random.Random, max_worlds: int = 5, agents: int = 2, n_vars: int = 2) -> KripkeModel:
    n = rng.randint(1, max_worlds)
    rels = []
    for _ in range(agents):
        pairs = {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3}
        pairs |= {(a, a) for a in range(n)}
        rels.append(transitive_closure(pairs, range(n)))
    val = {v: frozenset(w for w in range(n) if rng.random() < 0.5) for v in range(n_vars)}
    return KripkeModel(tuple(f"w{k}" for k in range(n)), tuple(rels), val)


def random_formula(rng: random.Random, max_depth: int = 3, agents: int = 2, n_vars: int = 2) -> Formula:
    if max_depth == 0 or rng.random() < 0.25:
        return BOT if rng.random() < 0.1 else Var(rng.randrange(n_vars))
    r = rng.random()
    if r < 0.4:
        return Imp(random_formula(rng, max_depth - 1, agents, n_vars),
                   random_formula(rng, max_depth - 1, agents, n_vars))
    if r < 0.75:
        return Box(rng.randrange(agents), random_formula(rng, max_depth - 1, agents, n_vars))
    return C(random_formula(rng, max_depth - 1, agents, n_vars))


def small_formulas(rng: random.Random, bound: int, agents: int = 2, n_vars: int = 2,
                   max_depth: int = 3) -> Iterator[Formula]:
    """Endless stream of random formulas whose closure has at most ``bound`` members."""
    while True:
        f = random_formula(rng, max_depth, agents, n_vars)
        if len(closure(f, agents)) <= bound:
            yield f
