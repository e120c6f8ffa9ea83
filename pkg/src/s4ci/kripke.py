"""Kripke models with one preorder per agent and S = transitive closure of their union."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .algebra import all_assignments, evaluate_batch
from .report import Report
from .syntax import BOT, Box, C, Formula, Imp, Var, big_and, variables


class ModelError(ValueError):
    pass


def transitive_closure(rel: Iterable[tuple], worlds: Iterable[Hashable]) -> frozenset:
    """Least transitive superset of ``rel`` (Warshall)."""
    worlds = list(worlds)
    succ = {w: set() for w in worlds}
    for a, b in rel:
        if a not in succ or b not in succ:
            raise ModelError(f"pair {(a, b)} mentions an unknown world")
        succ[a].add(b)
    for k in worlds:
        for i in worlds:
            if k in succ[i]:
                succ[i] |= succ[k]
    return frozenset((a, b) for a in worlds for b in succ[a])


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[str, ...]
    relations: tuple[frozenset, ...]
    valuation: Mapping[int, frozenset] = field(default_factory=dict, hash=False)
    s_relation: frozenset | None = None

    def __post_init__(self):
        if not self.worlds:
            raise ModelError("a model needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("world names must be distinct")
        if not self.relations:
            raise ModelError("a model needs at least one agent relation")
        n = len(self.worlds)
        for i, r in enumerate(self.relations):
            for a, b in r:
                if not (0 <= a < n and 0 <= b < n):
                    raise ModelError(f"relation {i} mentions an unknown world")
        for var, ws in self.valuation.items():
            if any(not 0 <= w < n for w in ws):
                raise ModelError(f"valuation of p{var} mentions an unknown world")
        if self.s_relation is None:
            union = frozenset().union(*self.relations)
            object.__setattr__(self, "s_relation", transitive_closure(union, range(n)))

    @classmethod
    def build(cls, worlds: Sequence[str], relations: Sequence[Iterable[tuple[str, str]]],
              valuation: Mapping[int, Iterable[str]], s_relation=None) -> "KripkeModel":
        """Construct from world names rather than indices."""
        idx = {w: k for k, w in enumerate(worlds)}
        try:
            rels = tuple(frozenset((idx[a], idx[b]) for a, b in r) for r in relations)
            val = {v: frozenset(idx[w] for w in ws) for v, ws in valuation.items()}
            s = None if s_relation is None else frozenset((idx[a], idx[b]) for a, b in s_relation)
        except KeyError as exc:
            raise ModelError(f"unknown world {exc.args[0]!r}") from None
        return cls(tuple(worlds), rels, val, s)

    @property
    def agents(self) -> int:
        return len(self.relations)

    @property
    def size(self) -> int:
        return len(self.worlds)

    def index(self, w) -> int:
        if isinstance(w, (int, np.integer)) and not isinstance(w, bool):
            if 0 <= w < len(self.worlds):
                return int(w)
        elif w in self.worlds:
            return self.worlds.index(w)
        raise ModelError(f"unknown world {w!r}")

    def successors(self, i: int, w: int) -> list[int]:
        return sorted(b for a, b in self.relations[i] if a == w)

    def s_successors(self, w: int) -> list[int]:
        return sorted(b for a, b in self.s_relation if a == w)

    def restrict(self, keep: Iterable[int]) -> "KripkeModel":
        """Submodel on the given worlds (relations restricted, S recomputed)."""
        keep = sorted(set(keep))
        new = {w: k for k, w in enumerate(keep)}
        rels = tuple(frozenset((new[a], new[b]) for a, b in r if a in new and b in new) for r in self.relations)
        val = {v: frozenset(new[w] for w in ws if w in new) for v, ws in self.valuation.items()}
        return KripkeModel(tuple(self.worlds[w] for w in keep), rels, val)


def validate_model(m: KripkeModel) -> Report:
    report = Report(subject=f"model with {m.size} worlds")
    n = m.size
    for i, r in enumerate(m.relations):
        for w in range(n):
            if (w, w) not in r:
                report.add(f"R_{i} reflexive", (m.worlds[w], m.worlds[w]))
        missing = [(a, c) for a, b in r for b2, c in r if b == b2 and (a, c) not in r]
        if missing:
            a, c = sorted(missing)[0]
            report.add(f"R_{i} transitive", (m.worlds[a], m.worlds[c]), f"{len(set(missing))} pairs")
    expected = transitive_closure(frozenset().union(*m.relations), range(n))
    for a, b in sorted(expected - m.s_relation):
        report.add("S contains the closure of the union", (m.worlds[a], m.worlds[b]))
    for a, b in sorted(m.s_relation - expected):
        report.add("S is no larger than the closure of the union", (m.worlds[a], m.worlds[b]))
    return report


def satisfies(m: KripkeModel, w, f: Formula) -> bool:
    """Pointwise truth; C holds at w iff the body holds at w and at every S-successor."""
    start = m.index(w)
    succ = [[m.successors(i, x) for x in range(m.size)] for i in range(m.agents)]
    s_succ = [m.s_successors(x) for x in range(m.size)]
    memo: dict[tuple[Formula, int], bool] = {}

    def sat(x: int, g: Formula) -> bool:
        key = (g, x)
        if key in memo:
            return memo[key]
        if isinstance(g, Var):
            out = x in m.valuation.get(g.n, ())
        elif g == BOT:
            out = False
        elif isinstance(g, Imp):
            out = (not sat(x, g.left)) or sat(x, g.right)
        elif isinstance(g, Box):
            if g.agent >= m.agents:
                raise ModelError(f"agent {g.agent} not present in the model")
            out = all(sat(y, g.body) for y in succ[g.agent][x])
        elif isinstance(g, C):
            out = sat(x, g.body) and all(sat(y, g.body) for y in s_succ[x])
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = out
        return out

    return sat(start, f)


def satisfies_gfp(m: KripkeModel, f: Formula) -> frozenset[int]:
    """Truth set of ``f``, computing C g as the greatest fixed point of Z -> [E g] & pre_E(Z)."""
    everything = frozenset(range(m.size))
    succ = [[set(m.successors(i, x)) for x in range(m.size)] for i in range(m.agents)]

    def box_set(i: int, Z: frozenset) -> frozenset:
        return frozenset(x for x in everything if succ[i][x] <= Z)

    def e_set(Z: frozenset) -> frozenset:
        out = everything
        for i in range(m.agents):
            out &= box_set(i, Z)
        return out

    memo: dict[Formula, frozenset] = {}

    def ext(g: Formula) -> frozenset:
        if g in memo:
            return memo[g]
        if isinstance(g, Var):
            out = frozenset(m.valuation.get(g.n, ())) & everything
        elif g == BOT:
            out = frozenset()
        elif isinstance(g, Imp):
            out = (everything - ext(g.left)) | ext(g.right)
        elif isinstance(g, Box):
            if g.agent >= m.agents:
                raise ModelError(f"agent {g.agent} not present in the model")
            out = box_set(g.agent, ext(g.body))
        elif isinstance(g, C):
            eg = e_set(ext(g.body))
            Z = everything
            while True:
                nxt = eg & e_set(Z)
                if nxt == Z:
                    break
                Z = nxt
            out = Z
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return ext(f)


def globally_true(m: KripkeModel, f: Formula) -> bool:
    return all(satisfies(m, w, f) for w in range(m.size))


def refute_consequence(models: Iterable[KripkeModel], sigma: Iterable[Formula],
                       gamma: Iterable[Formula], f: Formula):
    """First (model, world) where sigma holds everywhere, gamma at the world, and f fails there."""
    sigma = list(sigma)
    gamma = list(gamma)
    for m in models:
        if not all(globally_true(m, xi) for xi in sigma):
            continue
        for w in range(m.size):
            if all(satisfies(m, w, g) for g in gamma) and not satisfies(m, w, f):
                return m, w
    return None


# -- exhaustive search over small frames -----------------------------------

@lru_cache(maxsize=None)
def preorders(n: int) -> tuple[tuple[int, ...], ...]:
    """Every reflexive transitive relation on n points, as successor bitmasks."""
    off_diag = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = []
    for bits in range(1 << len(off_diag)):
        succ = [1 << a for a in range(n)]
        for k, (a, b) in enumerate(off_diag):
            if bits >> k & 1:
                succ[a] |= 1 << b
        if all(succ[b] & ~succ[a] == 0 for a in range(n) for b in range(n) if succ[a] >> b & 1):
            out.append(tuple(succ))
    return tuple(out)


def _permute(succ: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    n = len(succ)
    out = [0] * n
    for a in range(n):
        m = 0
        for b in range(n):
            if succ[a] >> b & 1:
                m |= 1 << perm[b]
        out[perm[a]] = m
    return tuple(out)


@lru_cache(maxsize=None)
def frames(n: int, agents: int) -> np.ndarray:
    """One representative per isomorphism class of n-world frames, shape (F, agents, n)."""
    pre = preorders(n)
    perms = list(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(pre)}
    perm_of = [[index[_permute(p, q)] for p in pre] for q in perms]
    seen = set()
    reps = []
    for combo in itertools.product(range(len(pre)), repeat=agents):
        canon = min(tuple(perm_of[q][c] for c in combo) for q in range(len(perms)))
        if canon in seen:
            continue
        seen.add(canon)
        reps.append([pre[c] for c in combo])
    return np.array(reps, dtype=np.intp).reshape(len(reps), agents, n)


def _box_tables(succ: np.ndarray, n: int) -> np.ndarray:
    """succ has shape (F, k, n); returns the box table of each relation, shape (F, k, 2^n)."""
    Y = np.arange(1 << n, dtype=np.intp)
    out = np.zeros(succ.shape[:2] + (1 << n,), dtype=np.intp)
    for w in range(n):
        ok = (succ[:, :, w, None] & ~Y[None, None, :]) == 0
        out |= ok.astype(np.intp) << w
    return out


def _closure_masks(union: np.ndarray, n: int) -> np.ndarray:
    s = union.copy()
    for k in range(n):
        has_k = (s >> k) & 1
        s = s | (has_k * s[:, k, None])
    return s


@dataclass(frozen=True)
class FrameBatch:
    n: int
    succ: np.ndarray
    boxes: np.ndarray
    cop: np.ndarray


@lru_cache(maxsize=None)
def frame_batch(n: int, agents: int) -> FrameBatch:
    succ = frames(n, agents)
    union = np.bitwise_or.reduce(succ, axis=1)
    s = _closure_masks(union, n)
    boxes = _box_tables(succ, n)
    cop = _box_tables(s[:, None, :], n)[:, 0, :]
    return FrameBatch(n, succ, boxes, cop)


def model_from_frame(succ: Sequence[Sequence[int]], valuation: Mapping[int, int]) -> KripkeModel:
    n = len(succ[0])
    rels = tuple(frozenset((a, b) for a in range(n) for b in range(n) if row[a] >> b & 1) for row in succ)
    val = {v: frozenset(w for w in range(n) if mask >> w & 1) for v, mask in valuation.items()}
    return KripkeModel(tuple(f"w{k}" for k in range(n)), rels, val)


def exhaustive_counterexample(sigma: Iterable[Formula], gamma: Iterable[Formula], f: Formula,
                              agents: int, max_worlds: int = 4):
    """Search every model with at most ``max_worlds`` worlds (up to isomorphism) for a refutation.

    Returns ``(model, world)`` or ``None``.
    """
    sigma = list(sigma)
    gamma = list(gamma)
    var_ids = sorted(set().union(variables(f), *(variables(g) for g in sigma + gamma)))
    s_all = big_and(sigma)
    g_all = big_and(gamma)
    for n in range(1, max_worlds + 1):
        batch = frame_batch(n, agents)
        full = (1 << n) - 1
        assign = all_assignments(1 << n, var_ids)
        top = np.full(batch.cop.shape[0], full, dtype=np.intp)
        sv = evaluate_batch(batch.boxes, batch.cop, top, assign, s_all)
        gv = evaluate_batch(batch.boxes, batch.cop, top, assign, g_all)
        fv = evaluate_batch(batch.boxes, batch.cop, top, assign, f)
        bad = (sv == full) & ((gv & ~fv & full) != 0)
        hits = np.argwhere(bad)
        if hits.size:
            fi, vi = (int(x) for x in hits[0])
            valuation = {v: int(assign[v][vi]) for v in var_ids}
            m = model_from_frame(batch.succ[fi].tolist(), valuation)
            mask = int(gv[fi, vi] & ~fv[fi, vi] & full)
            w = (mask & -mask).bit_length() - 1
            return m, w
    return None


# -- file format -----------------------------------------------------------

def parse_model(text: str) -> KripkeModel:
    """Read ``agents``, ``worlds``, ``rel i: (a,b) ...`` and ``val pK: ...`` lines."""
    import re

    agents = None
    worlds: list[str] | None = None
    rels: dict[int, list[tuple[str, str]]] = {}
    val: dict[int, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "agents":
            agents = int(rest)
        elif head == "worlds":
            worlds = rest.split()
        elif head == "rel":
            idx, colon, body = rest.partition(":")
            if not colon:
                raise ModelError(f"line {lineno}: expected 'rel i: (a,b) ...'")
            pairs = re.findall(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)", body)
            if len(pairs) != body.count("("):
                raise ModelError(f"line {lineno}: malformed pair list")
            rels.setdefault(int(idx), []).extend(pairs)
        elif head == "val":
            var, colon, body = rest.partition(":")
            var = var.strip()
            if not colon or not re.fullmatch(r"p\d+", var):
                raise ModelError(f"line {lineno}: expected 'val pK: worlds'")
            val[int(var[1:])] = body.split()
        else:
            raise ModelError(f"line {lineno}: unknown directive {head!r}")
    if agents is None or worlds is None:
        raise ModelError("model file needs 'agents' and 'worlds' lines")
    if any(not 0 <= i < agents for i in rels):
        raise ModelError("relation line for an undeclared agent")
    return KripkeModel.build(worlds, [rels.get(i, []) for i in range(agents)], val)


def dump_model(m: KripkeModel) -> str:
    lines = [f"agents {m.agents}", "worlds " + " ".join(m.worlds)]
    for i, r in enumerate(m.relations):
        pairs = " ".join(f"({m.worlds[a]},{m.worlds[b]})" for a, b in sorted(r))
        lines.append(f"rel {i}: {pairs}")
    for v in sorted(m.valuation):
        lines.append(f"val p{v}: " + " ".join(m.worlds[w] for w in sorted(m.valuation[v])))
    return "\n".join(lines) + "\n"
