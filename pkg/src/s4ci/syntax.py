"""Formulas of the common-knowledge logic: AST, parser, printer, closure sets.

Only five constructors exist (``Var``, ``Bot``, ``Imp``, ``Box``, ``C``).
Negation, truth, conjunction, disjunction, equivalence and mutual knowledge
``E`` are abbreviations that elaborate into those constructors at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


@dataclass(frozen=True, slots=True)
class Var:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"variable index must be non-negative, got {self.n}")


@dataclass(frozen=True, slots=True)
class Bot:
    pass


@dataclass(frozen=True, slots=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Box:
    agent: int
    body: "Formula"

    def __post_init__(self):
        if self.agent < 0:
            raise ValueError(f"agent index must be non-negative, got {self.agent}")


@dataclass(frozen=True, slots=True)
class C:
    body: "Formula"


Formula = Union[Var, Bot, Imp, Box, C]

BOT = Bot()


# -- abbreviations ---------------------------------------------------------

def neg(f: Formula) -> Formula:
    return Imp(f, BOT)


TOP = neg(BOT)


def conj(a: Formula, b: Formula) -> Formula:
    return neg(Imp(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Imp(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Imp(a, b), Imp(b, a))


def big_and(formulas: Iterable[Formula]) -> Formula:
    """Right-associated conjunction, ordered by rendered text; empty gives top."""
    items = sorted(set(formulas), key=lambda f: render(f, exact=True))
    if not items:
        return TOP
    out = items[-1]
    for f in reversed(items[:-1]):
        out = conj(f, out)
    return out


def e_op(f: Formula, agent_count: int) -> Formula:
    """Mutual knowledge: box_0 f & box_1 f & ... in ascending agent order."""
    if agent_count < 1:
        raise ValueError("agent_count must be positive")
    out: Formula = Box(agent_count - 1, f)
    for i in range(agent_count - 2, -1, -1):
        out = conj(Box(i, f), out)
    return out


def match_neg(f: Formula) -> Formula | None:
    if isinstance(f, Imp) and f.right == BOT:
        return f.left
    return None


def match_conj(f: Formula) -> tuple[Formula, Formula] | None:
    inner = match_neg(f)
    if isinstance(inner, Imp):
        b = match_neg(inner.right)
        if b is not None:
            return inner.left, b
    return None


def match_e(f: Formula, agent_count: int) -> Formula | None:
    """Return ``g`` when ``f`` is exactly ``E g`` for ``agent_count`` agents."""
    parts = []
    cur = f
    for i in range(agent_count - 1):
        m = match_conj(cur)
        if m is None:
            return None
        parts.append(m[0])
        cur = m[1]
    parts.append(cur)
    if not all(isinstance(p, Box) and p.agent == i for i, p in enumerate(parts)):
        return None
    body = parts[0].body
    if any(p.body != body for p in parts):
        return None
    return body


# -- traversal -------------------------------------------------------------

def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, Imp):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, (Box, C)):
            stack.append(g.body)
    return out


def size(f: Formula) -> int:
    if isinstance(f, Imp):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, (Box, C)):
        return 1 + size(f.body)
    return 1


def depth(f: Formula) -> int:
    if isinstance(f, Imp):
        return 1 + max(depth(f.left), depth(f.right))
    if isinstance(f, (Box, C)):
        return 1 + depth(f.body)
    return 0


def variables(f: Formula) -> set[int]:
    return {g.n for g in subformulas(f) if isinstance(g, Var)}


def max_agent(f: Formula) -> int:
    return max((g.agent for g in subformulas(f) if isinstance(g, Box)), default=-1)


# -- parsing ---------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|&|\||~|\(|\))|(?P<var>p\d+)|(?P<box>box\d+)"
    r"|(?P<kw>bot|top|C|E)(?![A-Za-z0-9_]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError("unexpected character", text, pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # lowest precedence first; all binary operators associate to the right
    LEVELS = ("<->", "->", "|", "&")

    def __init__(self, text: str, agent_count: int):
        self.text = text
        self.agents = agent_count
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(message, self.text, tok[2])

    def parse(self) -> Formula:
        f = self.binary(0)
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return f

    def binary(self, level: int) -> Formula:
        if level == len(self.LEVELS):
            return self.unary()
        op = self.LEVELS[level]
        left = self.binary(level + 1)
        tok = self.peek()
        if tok[0] == "op" and tok[1] == op:
            self.take()
            right = self.binary(level)
            return _combine(op, left, right)
        return left

    def unary(self) -> Formula:
        tok = self.take()
        kind, val, _ = tok
        if kind == "op" and val == "~":
            return neg(self.unary())
        if kind == "op" and val == "(":
            f = self.binary(0)
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return f
        if kind == "var":
            return Var(int(val[1:]))
        if kind == "box":
            agent = int(val[3:])
            if agent >= self.agents:
                self.fail(f"agent index {agent} out of range for {self.agents} agents", tok)
            return Box(agent, self.unary())
        if kind == "kw":
            if val == "bot":
                return BOT
            if val == "top":
                return TOP
            if val == "C":
                return C(self.unary())
            if val == "E":
                return e_op(self.unary(), self.agents)
        if kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected token {val!r}", tok)


def _combine(op: str, a: Formula, b: Formula) -> Formula:
    if op == "->":
        return Imp(a, b)
    if op == "&":
        return conj(a, b)
    if op == "|":
        return disj(a, b)
    return iff(a, b)


def parse(text: str, agent_count: int) -> Formula:
    """Parse the ASCII formula grammar; abbreviations are expanded."""
    if agent_count < 1:
        raise ValueError("agent_count must be positive")
    return _Parser(text, agent_count).parse()


# -- printing --------------------------------------------------------------

_UNICODE = {"bot": "⊥", "top": "⊤", "->": "→", "&": "∧", "|": "∨", "<->": "↔", "~": "¬", "box": "□"}


def render(f: Formula, exact: bool = False, agent_count: int | None = None,
           unicode: bool = False) -> str:
    """Print a formula so that ``parse(render(f)) == f``.

    With ``exact`` only the primitive constructors are printed.  Otherwise
    negation, truth, conjunction, disjunction, equivalence and (when
    ``agent_count`` is given) ``E`` are re-sugared.  Unicode output is for
    display only and does not parse back.
    """
    sym = _UNICODE if unicode else {k: k for k in _UNICODE}
    ATOM, UNARY, BINARY = 0, 1, 2

    def arg(g: Formula) -> str:
        # operand of a prefix operator
        text, kind = go(g)
        return text if kind == ATOM else f"({text})"

    def side(g: Formula) -> str:
        # operand of an infix operator
        text, kind = go(g)
        return f"({text})" if kind == BINARY else text

    def go(g: Formula) -> tuple[str, int]:
        if isinstance(g, Var):
            return f"p{g.n}", ATOM
        if isinstance(g, Bot):
            return sym["bot"], ATOM
        if not exact:
            if g == TOP:
                return sym["top"], ATOM
            if agent_count is not None and agent_count > 1:
                body = match_e(g, agent_count)
                if body is not None:
                    return "E " + arg(body), UNARY
            pair = match_conj(g)
            if pair is not None:
                a, b = pair
                if isinstance(a, Imp) and isinstance(b, Imp) and a.left == b.right and a.right == b.left:
                    return f"{side(a.left)} {sym['<->']} {side(a.right)}", BINARY
                return f"{side(a)} {sym['&']} {side(b)}", BINARY
            inner = match_neg(g)
            if inner is not None:
                return sym["~"] + arg(inner), UNARY
            if (isinstance(g, Imp) and match_neg(g.left) is not None
                    and match_conj(g.left) is None and g.left != TOP):
                return f"{side(match_neg(g.left))} {sym['|']} {side(g.right)}", BINARY
        if isinstance(g, Imp):
            return f"{side(g.left)} {sym['->']} {side(g.right)}", BINARY
        if isinstance(g, Box):
            return f"{sym['box']}{g.agent} " + arg(g.body), UNARY
        if isinstance(g, C):
            return "C " + arg(g.body), UNARY
        raise TypeError(f"not a formula: {g!r}")

    return go(f)[0]


def formula_key(f: Formula) -> str:
    """Canonical ordering key used wherever a deterministic order is needed."""
    return render(f, exact=True)


# -- closure ---------------------------------------------------------------

@dataclass(frozen=True)
class ClosureSet:
    formulas: frozenset
    agent_count: int

    def __len__(self):
        return len(self.formulas)

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.ordered())

    def __contains__(self, f) -> bool:
        return f in self.formulas

    def ordered(self) -> list[Formula]:
        """Members with every subformula listed before its superformulas."""
        return sorted(self.formulas, key=lambda g: (size(g), formula_key(g)))


def closure(f: Formula, agent_count: int) -> ClosureSet:
    """Subformula closure, extended so that ``C g`` brings ``box_i g`` and ``box_i C g``."""
    if agent_count < 1:
        raise ValueError("agent_count must be positive")
    if max_agent(f) >= agent_count:
        raise ValueError(f"formula mentions agent {max_agent(f)} but only {agent_count} agents exist")
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, Imp):
            stack += [g.left, g.right]
        elif isinstance(g, Box):
            stack.append(g.body)
        elif isinstance(g, C):
            stack.append(g.body)
            for i in range(agent_count):
                stack += [Box(i, g.body), Box(i, g)]
    return ClosureSet(frozenset(out), agent_count)
