"""Finite S4C algebras over a powerset carrier.

Elements are bitmasks over the atom list, so meet, join and order are plain
integer bit operations.  Each modal operator is stored as a full table indexed
by element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .report import Report
from .syntax import BOT, Box, C, Formula, Imp, Var

MAX_ATOMS = 12


class AlgebraError(ValueError):
    pass


class UnassignedVariable(KeyError):
    pass


@dataclass(frozen=True)
class FiniteAlgebra:
    atoms: tuple[str, ...]
    boxes: tuple[tuple[int, ...], ...]
    c: tuple[int, ...]

    def __post_init__(self):
        n = len(self.atoms)
        if n == 0:
            raise AlgebraError("an algebra needs at least one atom")
        if n > MAX_ATOMS:
            raise AlgebraError(f"{n} atoms exceeds the supported maximum of {MAX_ATOMS}")
        if len(set(self.atoms)) != n:
            raise AlgebraError("atom names must be distinct")
        if not self.boxes:
            raise AlgebraError("at least one agent operator is required")
        size = 1 << n
        for name, table in self._named_tables():
            if len(table) != size:
                raise AlgebraError(f"{name} table has {len(table)} entries, expected {size}")
            bad = [x for x in table if not 0 <= x < size]
            if bad:
                raise AlgebraError(f"{name} table contains non-element {bad[0]}")

    def _named_tables(self):
        for i, t in enumerate(self.boxes):
            yield f"box{i}", t
        yield "C", self.c

    # Boolean structure

    @property
    def agents(self) -> int:
        return len(self.boxes)

    @property
    def top(self) -> int:
        return (1 << len(self.atoms)) - 1

    @property
    def size(self) -> int:
        return 1 << len(self.atoms)

    @property
    def elements(self) -> range:
        return range(self.size)

    def meet(self, a: int, b: int) -> int:
        return a & b

    def join(self, a: int, b: int) -> int:
        return a | b

    def comp(self, a: int) -> int:
        return self.top & ~a

    def imp(self, a: int, b: int) -> int:
        return (self.top & ~a) | b

    @staticmethod
    def leq(a: int, b: int) -> bool:
        return a & ~b == 0

    # modal structure

    def box(self, i: int, a: int) -> int:
        return self.boxes[i][a]

    def cop(self, a: int) -> int:
        return self.c[a]

    def e(self, a: int) -> int:
        out = self.top
        for t in self.boxes:
            out &= t[a]
        return out

    @cached_property
    def e_table(self) -> tuple[int, ...]:
        return tuple(self.e(a) for a in self.elements)

    # naming

    def name(self, a: int) -> str:
        if a == 0:
            return "-"
        return ",".join(x for k, x in enumerate(self.atoms) if a >> k & 1)

    def element(self, text: str) -> int:
        return _parse_set(text, self.atoms)

    # numpy views for batch evaluation

    @cached_property
    def box_array(self) -> np.ndarray:
        return np.array(self.boxes, dtype=np.intp)

    @cached_property
    def c_array(self) -> np.ndarray:
        return np.array(self.c, dtype=np.intp)

    @classmethod
    def from_opens(cls, atoms: Sequence[str], box_opens: Sequence[Iterable[int]],
                   c_opens: Iterable[int]) -> "FiniteAlgebra":
        """Build tables from fixpoint sets: each operator maps x to the join of the opens below x."""
        n = len(atoms)
        return cls(tuple(atoms),
                   tuple(interior_table(n, ops) for ops in box_opens),
                   interior_table(n, c_opens))


def interior_table(n_atoms: int, opens: Iterable[int]) -> tuple[int, ...]:
    opens = sorted(set(opens))
    table = []
    for x in range(1 << n_atoms):
        out = 0
        for u in opens:
            if u & ~x == 0:
                out |= u
        table.append(out)
    return tuple(table)


def fixpoints(table: Sequence[int]) -> frozenset[int]:
    return frozenset(x for x, y in enumerate(table) if x == y)


# -- validation ------------------------------------------------------------

def _interior_violations(report: Report, name: str, table: Sequence[int], top: int,
                         show=str) -> None:
    t = np.asarray(table, dtype=np.int64)
    xs = np.arange(len(t), dtype=np.int64)
    if t[top] != top:
        report.add(f"{name}: op(1) = 1", top, f"got {show(int(t[top]))}")
    bad = np.nonzero(t & ~xs)[0]
    if bad.size:
        report.add(f"{name}: op(x) <= x", int(bad[0]), f"x = {show(int(bad[0]))}; {bad.size} elements")
    bad = np.nonzero(t[t] != t)[0]
    if bad.size:
        report.add(f"{name}: op(op(x)) = op(x)", int(bad[0]), f"x = {show(int(bad[0]))}; {bad.size} elements")
    meets = xs[:, None] & xs[None, :]
    bad = np.argwhere(t[meets] != (t[:, None] & t[None, :]))
    if bad.size:
        x, y = (int(v) for v in bad[0])
        report.add(f"{name}: op(x & y) = op(x) & op(y)", (x, y), f"x = {show(x)}, y = {show(y)}; {len(bad)} pairs")


def validate_algebra(A: FiniteAlgebra) -> Report:
    """Check every interior law for each operator and the two fixed-point inequalities."""
    report = Report(subject=f"algebra on {len(A.atoms)} atoms")
    for name, table in A._named_tables():
        _interior_violations(report, name, table, A.top, A.name)
    for a in A.elements:
        ca = A.cop(a)
        upper = A.e(a) & A.e(ca)
        if not A.leq(ca, upper):
            report.add("C a <= E a & E C a", a, f"a = {A.name(a)}, C a = {A.name(ca)}, E a & E C a = {A.name(upper)}")
            break
    for a in A.elements:
        ea = A.e(a)
        lower = ea & A.cop(A.imp(a, ea))
        if not A.leq(lower, A.cop(a)):
            report.add("E a & C(a -> E a) <= C a", a,
                       f"a = {A.name(a)}, left side {A.name(lower)}, C a = {A.name(A.cop(a))}")
            break
    return report


def e_op(A: FiniteAlgebra, a: int) -> int:
    return A.e(a)


def gfp_ce(A: FiniteAlgebra, a: int) -> int:
    """Greatest fixed point of z -> E a & E z by descending iteration from 1."""
    ea = A.e(a)
    z = A.top
    for _ in range(A.size + 1):
        nxt = ea & A.e(z)
        if nxt == z:
            return z
        z = nxt
    raise AssertionError("descending iteration did not stabilise")  # unreachable on a finite lattice


# -- valuations ------------------------------------------------------------

@dataclass(frozen=True)
class Valuation:
    algebra: FiniteAlgebra
    assignment: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for var, val in self.assignment.items():
            if not 0 <= val < self.algebra.size:
                raise AlgebraError(f"p{var} assigned non-element {val}")

    def __call__(self, f: Formula) -> int:
        return evaluate(self, f)


def evaluate(v: Valuation, f: Formula) -> int:
    A = v.algebra
    memo: dict[Formula, int] = {}

    def go(g: Formula) -> int:
        if g in memo:
            return memo[g]
        if isinstance(g, Var):
            if g.n not in v.assignment:
                raise UnassignedVariable(f"p{g.n} has no value")
            out = v.assignment[g.n]
        elif g == BOT:
            out = 0
        elif isinstance(g, Imp):
            out = A.imp(go(g.left), go(g.right))
        elif isinstance(g, Box):
            if g.agent >= A.agents:
                raise AlgebraError(f"agent {g.agent} not present in the algebra")
            out = A.box(g.agent, go(g.body))
        elif isinstance(g, C):
            out = A.cop(go(g.body))
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return go(f)


def evaluate_batch(boxes: np.ndarray, cop: np.ndarray, top: np.ndarray,
                   assignment: Mapping[int, np.ndarray], f: Formula) -> np.ndarray:
    """Evaluate ``f`` in many same-size structures under many valuations at once.

    ``boxes`` has shape (structures, agents, elements), ``cop`` shape
    (structures, elements) and ``top`` shape (structures,).  Each assignment
    entry has shape (structures, valuations) or (valuations,).  The result has
    shape (structures, valuations).
    """
    n_struct = cop.shape[0]
    top = np.asarray(top, dtype=np.intp)[:, None]
    memo: dict[Formula, np.ndarray] = {}
    shape = None
    for arr in assignment.values():
        shape = (n_struct, np.asarray(arr).shape[-1])
        break
    if shape is None:
        shape = (n_struct, 1)

    def go(g: Formula) -> np.ndarray:
        if g in memo:
            return memo[g]
        if isinstance(g, Var):
            if g.n not in assignment:
                raise UnassignedVariable(f"p{g.n} has no value")
            out = np.broadcast_to(np.asarray(assignment[g.n], dtype=np.intp), shape)
        elif g == BOT:
            out = np.zeros(shape, dtype=np.intp)
        elif isinstance(g, Imp):
            out = (~go(g.left) & top) | go(g.right)
        elif isinstance(g, Box):
            out = np.take_along_axis(boxes[:, g.agent, :], go(g.body), axis=1)
        elif isinstance(g, C):
            out = np.take_along_axis(cop, go(g.body), axis=1)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return np.ascontiguousarray(go(f))


def all_assignments(size: int, var_ids: Sequence[int]) -> dict[int, np.ndarray]:
    """Every assignment of the given variables to elements ``0..size-1``."""
    count = size ** len(var_ids)
    idx = np.arange(count, dtype=np.intp)
    return {v: (idx // size ** k) % size for k, v in enumerate(sorted(var_ids))}


# -- filters and consequence -----------------------------------------------

@dataclass(frozen=True)
class FilterHandle:
    generators: frozenset[int]
    members: frozenset[int]

    def __contains__(self, a: int) -> bool:
        return a in self.members


def filter_generated(A: FiniteAlgebra, S: Iterable[int]) -> FilterHandle:
    """The filter generated by ``S``: close under meets, then upward."""
    gens = frozenset(S)
    meets = {A.top}
    frontier = set(meets)
    while frontier:
        new = {m & s for m in frontier for s in gens} - meets
        meets |= new
        frontier = new
    members = frozenset(a for a in A.elements if any(A.leq(m, a) for m in meets))
    return FilterHandle(gens, members)


@dataclass(frozen=True)
class ConsequenceCheck:
    holds: bool
    vacuous: bool
    value: int
    filter_meet: int
    failed_premise: Formula | None = None


def algebraic_consequence(A: FiniteAlgebra, v: Valuation, sigma: Iterable[Formula],
                          gamma: Iterable[Formula], f: Formula) -> ConsequenceCheck:
    """Single-algebra, single-valuation instance of the mixed consequence relation."""
    value = evaluate(v, f)
    gamma_vals = [evaluate(v, g) for g in gamma]
    meet = A.top
    for g in gamma_vals:
        meet &= g
    for xi in sigma:
        if evaluate(v, xi) != A.top:
            return ConsequenceCheck(True, True, value, meet, xi)
    flt = filter_generated(A, gamma_vals)
    return ConsequenceCheck(value in flt, False, value, meet)


# -- standardness via the sigma-completeness argument -----------------------

def _chain_heads(A: FiniteAlgebra, d: int) -> set[int]:
    """Largest set X with every a in X below E d & E b for some b in X."""
    ed = A.e(d)
    X = set(A.elements)
    while True:
        keep = {a for a in X if any(A.leq(a, ed & A.e(b)) for b in X)}
        if keep == X:
            return X
        X = keep


def check_standard_sigma(A: FiniteAlgebra) -> bool:
    """Standardness by joining every chain head into b and replaying the join argument.

    Every element that starts an infinite sequence a_j <= E d & E a_{j+1}
    lies below b; the chain b <= E(d & b) <= C(d & b) <= C d then bounds it.
    """
    for d in A.elements:
        heads = _chain_heads(A, d)
        b = 0
        for a in heads:
            b |= a
        db = d & b
        if not A.leq(b, A.e(d) & A.e(b)):
            return False
        if A.e(d) & A.e(b) != A.e(db):
            return False
        if not A.leq(db, A.e(db)):
            return False
        if A.cop(A.imp(db, A.e(db))) != A.top:
            return False
        if not (A.leq(b, A.e(db) & A.cop(A.imp(db, A.e(db))))
                and A.leq(A.e(db) & A.cop(A.imp(db, A.e(db))), A.cop(db))
                and A.leq(A.cop(db), A.cop(d))):
            return False
        if not all(A.leq(a, A.cop(d)) for a in heads):
            return False
    return True


# -- file format -----------------------------------------------------------

def _parse_set(token: str, atoms: Sequence[str]) -> int:
    token = token.strip()
    if token in ("-", "{}"):
        return 0
    out = 0
    for part in token.strip("{}").split(","):
        part = part.strip()
        if part not in atoms:
            raise AlgebraError(f"unknown atom {part!r}")
        out |= 1 << atoms.index(part)
    return out


def parse_algebra(text: str) -> FiniteAlgebra:
    """Read the plain-text algebra format (``agents``, ``atoms``, ``boxI``/``C`` lines)."""
    agents = None
    atoms: list[str] | None = None
    ops: dict[str, tuple[str, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "agents":
            agents = int(rest)
        elif head == "atoms":
            atoms = rest.split()
        elif head.startswith("box") or head == "C":
            kind, _, body = rest.partition(":")
            kind = kind.strip()
            if kind not in ("table", "opens"):
                raise AlgebraError(f"line {lineno}: expected 'table:' or 'opens:'")
            if head in ops:
                raise AlgebraError(f"line {lineno}: {head} given twice")
            ops[head] = (kind, body)
        else:
            raise AlgebraError(f"line {lineno}: unknown directive {head!r}")
    if agents is None or atoms is None:
        raise AlgebraError("algebra file needs 'agents' and 'atoms' lines")
    if agents < 1:
        raise AlgebraError("agents must be positive")
    n = len(atoms)
    if n > MAX_ATOMS:
        raise AlgebraError(f"{n} atoms exceeds the supported maximum of {MAX_ATOMS}")

    def table_for(name: str) -> tuple[int, ...]:
        if name not in ops:
            raise AlgebraError(f"missing operator {name}")
        kind, body = ops[name]
        if kind == "opens":
            return interior_table(n, [_parse_set(t, atoms) for t in body.split()])
        table: dict[int, int] = {}
        for entry in body.split(";"):
            if not entry.strip():
                continue
            src, arrow, dst = entry.partition("->")
            if not arrow:
                raise AlgebraError(f"{name}: malformed table entry {entry!r}")
            x = _parse_set(src, atoms)
            if x in table:
                raise AlgebraError(f"{name}: element {src.strip()} appears twice")
            table[x] = _parse_set(dst, atoms)
        missing = [x for x in range(1 << n) if x not in table]
        if missing:
            raise AlgebraError(f"{name}: table has no entry for element {missing[0]}")
        return tuple(table[x] for x in range(1 << n))

    extra = set(ops) - {f"box{i}" for i in range(agents)} - {"C"}
    if extra:
        raise AlgebraError(f"operators {sorted(extra)} not declared by 'agents {agents}'")
    return FiniteAlgebra(tuple(atoms), tuple(table_for(f"box{i}") for i in range(agents)), table_for("C"))


def dump_algebra(A: FiniteAlgebra) -> str:
    lines = [f"agents {A.agents}", "atoms " + " ".join(A.atoms)]
    for name, table in A._named_tables():
        entries = "; ".join(f"{A.name(x)} -> {A.name(y)}" for x, y in enumerate(table))
        lines.append(f"{name} table: {entries}")
    return "\n".join(lines) + "\n"
