"""The relations a <_d b  iff  b <= E d & E a, their accessible parts and heights.

Heights on a finite carrier are natural numbers; elements outside the
accessible part get ``INF`` (``math.inf``, so ``INF + 1 == INF`` for free).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .algebra import FiniteAlgebra
from .stone import Ultrafilter, hat, is_ultrafilter, ultrafilters

INF = math.inf
Height = Union[int, float]


# -- generic directed graphs -----------------------------------------------

def accessible_nodes(nodes: Iterable[Hashable], preds: Mapping) -> list:
    """Least fixpoint of X -> {a | every predecessor of a is in X}, in acceptance order."""
    nodes = list(nodes)
    accepted: set = set()
    order: list = []
    while True:
        stage = [a for a in nodes if a not in accepted and all(p in accepted for p in preds[a])]
        if not stage:
            return order
        accepted.update(stage)
        order.extend(stage)


def node_heights(nodes: Iterable[Hashable], preds: Mapping) -> dict:
    nodes = list(nodes)
    ht: dict = {}
    for a in accessible_nodes(nodes, preds):
        # every predecessor was accepted at an earlier stage
        ht[a] = max((ht[b] + 1 for b in preds[a]), default=0)
    for a in nodes:
        ht.setdefault(a, INF)
    return ht


def product_preds(preds1: Mapping, preds2: Mapping) -> dict:
    """Predecessor map of the product graph: (b1, b2) < (c1, c2) iff both components are."""
    return {(c1, c2): [(b1, b2) for b1 in preds1[c1] for b2 in preds2[c2]]
            for c1 in preds1 for c2 in preds2}


# -- the algebra relations -------------------------------------------------

@dataclass(frozen=True)
class PrecGraph:
    algebra: FiniteAlgebra
    d: int
    edges: frozenset

    @property
    def nodes(self) -> range:
        return self.algebra.elements

    @cached_property
    def preds(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {b: [] for b in self.nodes}
        for a, b in sorted(self.edges):
            out[b].append(a)
        return {b: tuple(v) for b, v in out.items()}


def build_prec(A: FiniteAlgebra, d: int) -> PrecGraph:
    ed = A.e(d)
    edges = frozenset((a, b) for a in A.elements for b in A.elements if A.leq(b, ed & A.e(a)))
    return PrecGraph(A, d, edges)


def accessible_part(g: PrecGraph) -> frozenset[int]:
    return frozenset(accessible_nodes(g.nodes, g.preds))


@dataclass(frozen=True)
class HeightMap:
    heights: dict = field(hash=False)

    def __getitem__(self, a) -> Height:
        return self.heights[a]

    def finite(self) -> dict:
        return {a: h for a, h in self.heights.items() if h != INF}


def heights(g: PrecGraph) -> HeightMap:
    return HeightMap(node_heights(g.nodes, g.preds))


@lru_cache(maxsize=4096)
def _heights_for(A: FiniteAlgebra, d: int) -> HeightMap:
    return heights(build_prec(A, d))


def height(A: FiniteAlgebra, d: int, a: int) -> Height:
    return _heights_for(A, d)[a]


def algebra_height(A: FiniteAlgebra, d: int) -> int:
    """sup of ht_d(b) + 1 over b not below C d (0 for an empty supremum)."""
    hm = _heights_for(A, d)
    cd = A.cop(d)
    vals = [hm[b] + 1 for b in A.elements if not A.leq(b, cd)]
    out = max(vals, default=0)
    if out == INF:
        raise ValueError("an element outside C d has infinite height; the algebra is not standard")
    if out > A.size:
        raise AssertionError(f"height {out} exceeds carrier size {A.size}")
    return int(out)


def m_ideal(A: FiniteAlgebra, d: int, gamma: Height) -> frozenset[int]:
    hm = _heights_for(A, d)
    return frozenset(a for a in A.elements if gamma <= hm[a])


def ideal_problem(A: FiniteAlgebra, S: frozenset[int]) -> str | None:
    if 0 not in S:
        return "0 missing"
    for a in S:
        for b in S:
            if a | b not in S:
                return f"join of {A.name(a)} and {A.name(b)} missing"
        for b in A.elements:
            if A.leq(b, a) and b not in S:
                return f"{A.name(b)} below {A.name(a)} missing"
    return None


# -- standardness ----------------------------------------------------------

@dataclass(frozen=True)
class Lasso:
    """a_0, ..., a_{k-1} with a_j <= E d & E a_{j+1} and a_k := a_loop."""

    d: int
    sequence: tuple[int, ...]
    loop: int

    def successor(self, j: int) -> int:
        return self.loop if j + 1 == len(self.sequence) else j + 1


@dataclass(frozen=True)
class DStatus:
    d: int
    accessible: int
    max_height: Height
    standard: bool


@dataclass(frozen=True)
class StandardResult:
    standard: bool
    per_d: tuple[DStatus, ...]
    witness: Lasso | None = None


def _shortest_lasso(g: PrecGraph, start: int, allowed: frozenset[int]) -> Lasso:
    """Shortest descending sequence from ``start`` that closes into a cycle."""
    preds = {b: [a for a in g.preds[b] if a in allowed] for b in allowed}
    # BFS from start along predecessor edges
    parent = {start: None}
    dist = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in sorted(preds[x]):
            if y not in dist:
                dist[y] = dist[x] + 1
                parent[y] = x
                queue.append(y)

    def path_to(x):
        out = []
        while x is not None:
            out.append(x)
            x = parent[x]
        return out[::-1]

    best = None
    for x in sorted(dist, key=lambda v: (dist[v], v)):
        # shortest cycle through x
        back = {x: None}
        q = deque([x])
        cycle = None
        while q and cycle is None:
            y = q.popleft()
            for z in sorted(preds[y]):
                if z == x:
                    cycle = y
                    break
                if z not in back:
                    back[z] = y
                    q.append(z)
        if cycle is None:
            continue
        loop_path = []
        y = cycle
        while y is not None:
            loop_path.append(y)
            y = back[y]
        loop_path = loop_path[::-1]  # x, ..., cycle end
        prefix = path_to(x)
        seq = prefix[:-1] + loop_path
        cand = Lasso(g.d, tuple(seq), len(prefix) - 1)
        if best is None or len(cand.sequence) < len(best.sequence):
            best = cand
    if best is None:
        raise AssertionError("inaccessible element without a reachable cycle")
    return best


def check_standard(A: FiniteAlgebra) -> StandardResult:
    """Compare each accessible part with {a | a not below C d}; return a lasso on failure."""
    per_d = []
    witness = None
    for d in A.elements:
        g = build_prec(A, d)
        acc = accessible_part(g)
        cd = A.cop(d)
        expected = frozenset(a for a in A.elements if not A.leq(a, cd))
        ok = acc == expected
        hm = heights(g)
        finite = [h for h in hm.heights.values() if h != INF]
        per_d.append(DStatus(d, len(acc), max(finite, default=0), ok))
        if not ok and witness is None:
            bad = sorted(expected - acc)
            if bad:
                witness = _shortest_lasso(g, bad[0], frozenset(A.elements) - acc)
    return StandardResult(all(s.standard for s in per_d), tuple(per_d), witness)


def lasso_ok(A: FiniteAlgebra, w: Lasso) -> bool:
    """True when the lasso really is a descending sequence whose head escapes C d."""
    ed = A.e(w.d)
    for j, a in enumerate(w.sequence):
        nxt = w.sequence[w.successor(j)]
        if not A.leq(a, ed & A.e(nxt)):
            return False
    return not A.leq(w.sequence[0], A.cop(w.d))


# -- ultrafilter ranks -----------------------------------------------------

def rank_ultrafilter(A: FiniteAlgebra, d: int, u: Ultrafilter) -> Height:
    if not is_ultrafilter(A, u.members):
        raise ValueError("not an ultrafilter of this algebra")
    if A.cop(d) in u:
        return INF
    top = algebra_height(A, d)
    for gamma in range(top + 1):
        if not any(a in u for a in m_ideal(A, d, gamma)):
            return gamma
    raise AssertionError("u meets M_d(ht_d(A)) although C d is not in u")


def j_set(A: FiniteAlgebra, d: int, gamma: Height) -> list[Ultrafilter]:
    return [u for u in ultrafilters(A) if gamma <= rank_ultrafilter(A, d, u)]


class RankTable:
    """Ranks of every ultrafilter for one ``d``, with J-sets as bitmasks over ``ults``."""

    def __init__(self, A: FiniteAlgebra, d: int, ults: Sequence[Ultrafilter]):
        self.algebra = A
        self.d = d
        self.ults = list(ults)
        self.algebra_height = algebra_height(A, d)
        self.ranks = [rank_ultrafilter(A, d, u) for u in self.ults]

    def j_mask(self, gamma: Height) -> int:
        out = 0
        for k, r in enumerate(self.ranks):
            if gamma <= r:
                out |= 1 << k
        return out

    def hat(self, a: int) -> int:
        return hat(self.ults, a)
