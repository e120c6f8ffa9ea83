"""Validity via elimination of Hintikka sets, with countermodel extraction.

A Hintikka set is stored as the bitmask of its positive members over the
indexed closure of the negated query.  Implications are determined by their
parts, so only variables and modal members are enumerated freely.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .kripke import KripkeModel, satisfies, transitive_closure, validate_model
from .syntax import BOT, Box, C, Formula, Imp, Var, big_and, closure, neg

DEFAULT_CAP_CLOSURE = 24
DEFAULT_CAP_SETS = 1 << 16
_CHUNK = 1 << 18


class ResourceCapExceeded(RuntimeError):
    pass


class Verdict(enum.Enum):
    VALID = "Valid"
    INVALID = "Invalid"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DecisionResult:
    verdict: Verdict
    formula: Formula
    countermodel: KripkeModel | None = None
    world: int | None = None

    @property
    def valid(self) -> bool:
        return self.verdict is Verdict.VALID


@dataclass(frozen=True)
class Hintikka:
    positives: frozenset
    negatives: frozenset


class _Tableau:
    def __init__(self, query: Formula, agents: int, cap_closure: int, cap_sets: int):
        self.query = query
        self.agents = agents
        cl = closure(neg(query), agents)
        if len(cl) > cap_closure:
            raise ResourceCapExceeded(f"closure has {len(cl)} members, cap is {cap_closure}")
        self.members = cl.ordered()
        self.index = {f: k for k, f in enumerate(self.members)}
        self.free = [k for k, f in enumerate(self.members) if isinstance(f, (Var, Box, C))]
        if len(self.free) > 30:
            raise ResourceCapExceeded(f"{len(self.free)} independent members to enumerate")
        self.cap_sets = cap_sets
        self.box_mask = [0] * agents
        for k, f in enumerate(self.members):
            if isinstance(f, Box):
                self.box_mask[f.agent] |= 1 << k
        self.pos = self._enumerate()

    def bit(self, f: Formula) -> int:
        return 1 << self.index[f]

    def _enumerate(self) -> np.ndarray:
        total = 1 << len(self.free)
        kept = []
        count = 0
        for start in range(0, total, _CHUNK):
            code = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64)
            pos = np.zeros_like(code)
            for j, k in enumerate(self.free):
                pos |= ((code >> np.uint64(j)) & np.uint64(1)) << np.uint64(k)
            for k, f in enumerate(self.members):
                if isinstance(f, Imp):
                    a = (pos >> np.uint64(self.index[f.left])) & np.uint64(1)
                    b = (pos >> np.uint64(self.index[f.right])) & np.uint64(1)
                    pos |= ((np.uint64(1) - a) | b) << np.uint64(k)
            ok = np.ones(pos.shape, dtype=bool)
            for f in self.members:
                if isinstance(f, Box):
                    ok &= ~self._has(pos, f) | self._has(pos, f.body)
                elif isinstance(f, C):
                    need = self.bit(f.body)
                    for i in range(self.agents):
                        need |= self.bit(Box(i, f.body)) | self.bit(Box(i, f))
                    ok &= ~self._has(pos, f) | ((pos & np.uint64(need)) == np.uint64(need))
            chunk = pos[ok]
            count += chunk.size
            if count > self.cap_sets:
                raise ResourceCapExceeded(f"more than {self.cap_sets} Hintikka sets")
            kept.append(chunk)
        return np.concatenate(kept) if kept else np.zeros(0, dtype=np.uint64)

    def _has(self, pos: np.ndarray, f: Formula) -> np.ndarray:
        return ((pos >> np.uint64(self.index[f])) & np.uint64(1)).astype(bool)

    def _reaches(self, sources: np.ndarray, targets: np.ndarray, agent: int) -> np.ndarray:
        """For each source set, whether some target set is an agent-successor of it."""
        out = np.zeros(sources.size, dtype=bool)
        if not targets.size or not sources.size:
            return out
        req = sources & np.uint64(self.box_mask[agent])
        uniq, inverse = np.unique(req, return_inverse=True)
        tgt = np.unique(targets)
        hit = np.zeros(uniq.size, dtype=bool)
        step = max(1, (1 << 22) // max(1, tgt.size))
        for s in range(0, uniq.size, step):
            u = uniq[s:s + step, None]
            hit[s:s + step] = ((tgt[None, :] & u) == u).any(axis=1)
        return hit[inverse]

    def eliminate(self) -> np.ndarray:
        pos = self.pos
        alive = np.ones(pos.size, dtype=bool)
        c_members = [f for f in self.members if isinstance(f, C)]
        box_members = [f for f in self.members if isinstance(f, Box)]
        while True:
            before = int(alive.sum())
            for f in c_members:
                reach = alive & ~self._has(pos, f.body)
                while True:
                    cand = alive & ~reach
                    idx = np.nonzero(cand)[0]
                    grow = np.zeros(idx.size, dtype=bool)
                    for i in range(self.agents):
                        grow |= self._reaches(pos[idx], pos[reach], i)
                    if not grow.any():
                        break
                    reach[idx[grow]] = True
                alive &= self._has(pos, f) | reach
            for f in box_members:
                idx = np.nonzero(alive & ~self._has(pos, f))[0]
                targets = pos[alive & ~self._has(pos, f.body)]
                ok = self._reaches(pos[idx], targets, f.agent)
                alive[idx[~ok]] = False
            if int(alive.sum()) == before:
                return alive

    # countermodel construction

    def successor(self, h: int, g: int, agent: int) -> bool:
        req = h & self.box_mask[agent]
        return g & req == req

    def countermodel(self, alive: np.ndarray, root: int) -> tuple[KripkeModel, int]:
        sets = [int(x) for x in self.pos[alive]]
        order = sorted(range(len(sets)), key=lambda k: sets[k])
        sets = [sets[k] for k in order]
        start = sets.index(root)

        def neg_has(h: int, f: Formula) -> bool:
            return not h & self.bit(f)

        chosen = [start]
        seen = {start}
        queue = deque([start])
        while queue:
            k = queue.popleft()
            h = sets[k]
            wanted: list[int] = []
            for f in self.members:
                if isinstance(f, C) and neg_has(h, f):
                    wanted += self._path(sets, k, f.body)
            for f in self.members:
                if isinstance(f, Box) and neg_has(h, f):
                    wanted.append(next(j for j, g in enumerate(sets)
                                       if self.successor(h, g, f.agent) and neg_has(g, f.body)))
            for j in wanted:
                if j not in seen:
                    seen.add(j)
                    chosen.append(j)
                    queue.append(j)
        return self._model([sets[k] for k in chosen]), 0

    def _path(self, sets: list[int], start: int, body: Formula) -> list[int]:
        parent = {start: None}
        queue = deque([start])
        while queue:
            k = queue.popleft()
            if not sets[k] & self.bit(body):
                out = []
                while k is not None:
                    out.append(k)
                    k = parent[k]
                return out[::-1]
            for j, g in enumerate(sets):
                if j not in parent and any(self.successor(sets[k], g, i) for i in range(self.agents)):
                    parent[j] = k
                    queue.append(j)
        raise AssertionError("surviving set lost its eventuality witness")

    def _model(self, sets: list[int]) -> KripkeModel:
        n = len(sets)
        rels = tuple(frozenset((a, b) for a in range(n) for b in range(n)
                               if self.successor(sets[a], sets[b], i)) for i in range(self.agents))
        val = {}
        for f in self.members:
            if isinstance(f, Var):
                val[f.n] = frozenset(k for k in range(n) if sets[k] & self.bit(f))
        return KripkeModel(tuple(f"h{k}" for k in range(n)), rels, val)

    def hintikka(self, h: int) -> Hintikka:
        pos = frozenset(f for k, f in enumerate(self.members) if h >> k & 1)
        return Hintikka(pos, frozenset(self.members) - pos)


class _LazyTableau:
    """Goal-directed variant: downward-saturated sets built on demand, cached globally.

    A pre-state is a pair of masks (positive, negative) over the closure.
    Saturation splits it into states; each negative box in a state demands
    a successor pre-state carrying that agent's positive boxes.
    """

    def __init__(self, query: Formula, agents: int, cap_closure: int, cap_sets: int):
        self.query = query
        self.agents = agents
        cl = closure(neg(query), agents)
        if len(cl) > cap_closure:
            raise ResourceCapExceeded(f"closure has {len(cl)} members, cap is {cap_closure}")
        self.members = cl.ordered()
        self.index = {f: k for k, f in enumerate(self.members)}
        self.cap_sets = cap_sets
        self.box_mask = [0] * agents
        for k, f in enumerate(self.members):
            if isinstance(f, Box):
                self.box_mask[f.agent] |= 1 << k
        self.bot = self.bit(BOT) if BOT in self.index else 0
        self.sat_cache: dict[tuple[int, int], tuple] = {}
        self.demands: dict[tuple[int, int], tuple] = {}
        self.count = 0

    def bit(self, f: Formula) -> int:
        return 1 << self.index[f]

    def saturate(self, pre: tuple[int, int]) -> tuple:
        hit = self.sat_cache.get(pre)
        if hit is not None:
            return hit
        out: list[tuple[int, int]] = []
        stack = [pre]
        while stack:
            pos, ng = stack.pop()
            while True:
                if pos & ng or pos & self.bot:
                    break
                step = self._expand(pos, ng)
                if step is None:
                    out.append((pos, ng))
                    break
                if len(step) == 1:
                    pos, ng = step[0]
                else:
                    stack.extend(step[1:])
                    pos, ng = step[0]
        res = tuple(sorted(set(out)))
        self.count += len(res) + 1
        if self.count > self.cap_sets:
            raise ResourceCapExceeded(f"more than {self.cap_sets} tableau nodes")
        self.sat_cache[pre] = res
        return res

    def _expand(self, pos: int, ng: int):
        """One rule application, or None when the pair is saturated."""
        for k, f in enumerate(self.members):
            b = 1 << k
            if pos & b:
                if isinstance(f, Imp):
                    l, r = self.bit(f.left), self.bit(f.right)
                    if not (ng & l or pos & r):
                        return [(pos, ng | l), (pos | r, ng)]
                elif isinstance(f, Box):
                    r = self.bit(f.body)
                    if not pos & r:
                        return [(pos | r, ng)]
                elif isinstance(f, C):
                    need = self.bit(f.body)
                    for i in range(self.agents):
                        need |= self.bit(Box(i, f.body)) | self.bit(Box(i, f))
                    if pos & need != need:
                        return [(pos | need, ng)]
            elif ng & b:
                if isinstance(f, Imp):
                    l, r = self.bit(f.left), self.bit(f.right)
                    if pos & l != l or ng & r != r:
                        return [(pos | l, ng | r)]
                elif isinstance(f, C):
                    opts = [self.bit(f.body)] + [self.bit(Box(i, f)) for i in range(self.agents)]
                    if not any(ng & o for o in opts):
                        return [(pos, ng | o) for o in opts]
        return None

    def demand_list(self, state: tuple[int, int]) -> tuple:
        """(agent, demanded member index, successor pre-state) for each negative box."""
        hit = self.demands.get(state)
        if hit is not None:
            return hit
        pos, ng = state
        out = []
        for k, f in enumerate(self.members):
            if ng >> k & 1 and isinstance(f, Box):
                out.append((f.agent, k, (pos & self.box_mask[f.agent], self.bit(f.body))))
        self.demands[state] = tuple(out)
        return self.demands[state]

    def build(self, root: tuple[int, int]) -> None:
        seen = {root}
        queue = deque([root])
        while queue:
            pre = queue.popleft()
            for st in self.saturate(pre):
                for _, _, succ in self.demand_list(st):
                    if succ not in seen:
                        seen.add(succ)
                        queue.append(succ)
        self.pres = seen

    def eventualities(self, state: tuple[int, int]) -> list[Formula]:
        return [f for k, f in enumerate(self.members) if state[1] >> k & 1 and isinstance(f, C)]

    def eliminate(self) -> set:
        states = {st for pre in self.pres for st in self.sat_cache[pre]}
        alive = set(states)
        c_members = [f for f in self.members if isinstance(f, C)]
        while True:
            before = len(alive)
            pre_alive = {pre for pre in self.pres if any(st in alive for st in self.sat_cache[pre])}
            alive = {st for st in alive if all(d[2] in pre_alive for d in self.demand_list(st))}
            for f in c_members:
                rank = self.ranks(alive, f)
                alive = {st for st in alive if not st[1] & self.bit(f) or st in rank}
            if len(alive) == before:
                self.alive = alive
                return alive

    def ranks(self, alive: set, f: C) -> dict:
        """Least number of demand steps from each live state to a refutation of f's body."""
        fb, body = self.bit(f), self.bit(f.body)
        steps = {Box(i, f): i for i in range(self.agents)}
        rank = {st: 0 for st in alive if st[1] & fb and st[1] & body}
        level = 0
        while True:
            level += 1
            new = {}
            for st in alive:
                if st in rank or not st[1] & fb:
                    continue
                for _, k, succ in self.demand_list(st):
                    if self.members[k] in steps and any(t in rank for t in self.sat_cache[succ]):
                        new[st] = level
                        break
            if not new:
                return rank
            rank.update(new)

    def countermodel(self, root_state: tuple[int, int]) -> KripkeModel:
        alive = self.alive
        c_members = [f for f in self.members if isinstance(f, C)]
        rank_of = {f: self.ranks(alive, f) for f in c_members}

        def pick(succ, k):
            cands = [t for t in self.sat_cache[succ] if t in alive]
            f = self.members[k]
            if isinstance(f, Box) and isinstance(f.body, C) and f.body in rank_of:
                r = rank_of[f.body]
                ranked = [t for t in cands if t in r]
                if ranked:
                    return min(ranked, key=lambda t: (r[t], t))
            return min(cands)

        worlds = [root_state]
        where = {root_state: 0}
        edges: list[set] = [set() for _ in range(self.agents)]
        queue = deque([root_state])
        while queue:
            st = queue.popleft()
            for agent, k, succ in self.demand_list(st):
                t = pick(succ, k)
                if t not in where:
                    where[t] = len(worlds)
                    worlds.append(t)
                    queue.append(t)
                edges[agent].add((where[st], where[t]))
        n = len(worlds)
        rels = []
        for i in range(self.agents):
            base = edges[i] | {(w, w) for w in range(n)}
            rels.append(transitive_closure(base, range(n)))
        val = {}
        for f in self.members:
            if isinstance(f, Var):
                val[f.n] = frozenset(w for w, st in enumerate(worlds) if st[0] & self.bit(f))
        return KripkeModel(tuple(f"s{k}" for k in range(n)), tuple(rels), val)


def _generated(m: KripkeModel, world: int) -> tuple[KripkeModel, int]:
    keep = sorted({world} | set(m.s_successors(world)))
    return m.restrict(keep), keep.index(world)


def _minimize(m: KripkeModel, world: int, f: Formula) -> tuple[KripkeModel, int]:
    """Greedily drop worlds while the model still refutes ``f`` at the root.

    The model is kept generated by the root, so everything in it is
    reachable and premises made common knowledge at the root hold everywhere.
    """
    m, world = _generated(m, world)
    k = 0
    while k < m.size:
        if k == world:
            k += 1
            continue
        rest = [j for j in range(m.size) if j != k]
        trial, w2 = _generated(m.restrict(rest), rest.index(world))
        if validate_model(trial).ok and not satisfies(trial, w2, f):
            m, world = trial, w2
            k = 0
        else:
            k += 1
    return m, world


def decide_valid(f: Formula, agent_count: int, cap_closure: int = DEFAULT_CAP_CLOSURE,
                 cap_sets: int = DEFAULT_CAP_SETS, minimize: bool = True,
                 method: str = "auto") -> DecisionResult:
    """Valid iff ``f`` holds at every world of every Kripke model for ``agent_count`` agents.

    ``method`` is ``full`` (every fully decided Hintikka set is enumerated),
    ``lazy`` (sets are built on demand from the negated query) or ``auto``,
    which uses ``full`` whenever its enumeration fits under ``cap_sets``.
    """
    if method == "auto":
        cl = closure(neg(f), agent_count)
        if len(cl) > cap_closure:
            raise ResourceCapExceeded(f"closure has {len(cl)} members, cap is {cap_closure}")
        free = sum(isinstance(g, (Var, Box, C)) for g in cl.formulas)
        method = "full" if 1 << free <= cap_sets else "lazy"
    if method == "full":
        tab = _Tableau(f, agent_count, cap_closure, cap_sets)
        alive = tab.eliminate()
        fbit = np.uint64(tab.bit(f))
        roots = tab.pos[alive & ((tab.pos & fbit) == 0)]
        if roots.size == 0:
            return DecisionResult(Verdict.VALID, f)
        model, world = tab.countermodel(alive, int(roots.min()))
    elif method == "lazy":
        tab = _LazyTableau(f, agent_count, cap_closure, cap_sets)
        root = (0, tab.bit(f))
        tab.build(root)
        live = tab.eliminate()
        roots = [st for st in tab.sat_cache[root] if st in live]
        if not roots:
            return DecisionResult(Verdict.VALID, f)
        model, world = tab.countermodel(min(roots)), 0
    else:
        raise ValueError(f"unknown method {method!r}")
    if minimize:
        model, world = _minimize(model, world, f)
    if not validate_model(model).ok or satisfies(model, world, f):
        raise AssertionError("extracted countermodel does not refute the query")
    return DecisionResult(Verdict.INVALID, f, model, world)


def hintikka_sets(f: Formula, agent_count: int, surviving: bool = True,
                  cap_closure: int = DEFAULT_CAP_CLOSURE, cap_sets: int = DEFAULT_CAP_SETS) -> list[Hintikka]:
    """The Hintikka sets over the closure of the negated query (after elimination by default)."""
    tab = _Tableau(f, agent_count, cap_closure, cap_sets)
    pos = tab.pos[tab.eliminate()] if surviving else tab.pos
    return [tab.hintikka(int(h)) for h in sorted(pos.tolist())]


# -- derivability relations ------------------------------------------------

def local_query(gamma: Iterable[Formula], f: Formula) -> Formula:
    gamma = list(gamma)
    return Imp(big_and(gamma), f) if gamma else f


def global_query(sigma: Iterable[Formula], f: Formula) -> Formula:
    sigma = list(sigma)
    return Imp(C(big_and(sigma)), f) if sigma else f


def mixed_query(sigma: Iterable[Formula], gamma: Iterable[Formula], f: Formula) -> Formula:
    return global_query(sigma, local_query(gamma, f))


def derives_l(gamma: Iterable[Formula], f: Formula, agent_count: int, **caps) -> DecisionResult:
    return decide_valid(local_query(gamma, f), agent_count, **caps)


def derives_g(sigma: Iterable[Formula], f: Formula, agent_count: int, **caps) -> DecisionResult:
    return decide_valid(global_query(sigma, f), agent_count, **caps)


def derives_mixed(sigma: Iterable[Formula], gamma: Iterable[Formula], f: Formula,
                  agent_count: int, **caps) -> DecisionResult:
    return decide_valid(mixed_query(sigma, gamma, f), agent_count, **caps)
