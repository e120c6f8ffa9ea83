"""Finite topologies, interior operators and the ultrafilter representation.

Point sets are bitmasks over an indexed point list, matching the element
encoding of :mod:`s4ci.algebra`, so the powerset algebra of a space shares
its carrier with the space's subsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .algebra import FiniteAlgebra, fixpoints, validate_algebra
from .report import Report


class TopologyError(ValueError):
    pass


class KuratowskiError(ValueError):
    def __init__(self, condition: str, witness):
        super().__init__(f"interior law violated: {condition} (witness {witness})")
        self.condition = condition
        self.witness = witness


def _closure_under(family: Iterable[int], full: int) -> frozenset[int]:
    opens = set(family) | {0, full}
    frontier = set(opens)
    while frontier:
        new = set()
        for u in frontier:
            for v in opens:
                for w in (u | v, u & v):
                    if w not in opens:
                        new.add(w)
        opens |= new
        frontier = new
    return frozenset(opens)


def _union_closure(family: Iterable[int]) -> frozenset[int]:
    opens = set(family) | {0}
    frontier = set(opens)
    while frontier:
        new = {u | v for u in frontier for v in opens} - opens
        opens |= new
        frontier = new
    return frozenset(opens)


@dataclass(frozen=True)
class Topology:
    full: int
    opens: frozenset[int]

    def __post_init__(self):
        problem = topology_problem(self.full, self.opens)
        if problem:
            raise TopologyError(problem)

    @classmethod
    def generated(cls, full: int, family: Iterable[int]) -> "Topology":
        return cls(full, _closure_under(family, full))

    def __contains__(self, u: int) -> bool:
        return u in self.opens

    def interior(self, Y: int) -> int:
        return interior(self, Y)

    def table(self) -> tuple[int, ...]:
        return tuple(interior(self, Y) for Y in range(self.full + 1))


def topology_problem(full: int, opens: frozenset[int]) -> str | None:
    if 0 not in opens:
        return "empty set is not open"
    if full not in opens:
        return "whole space is not open"
    for u in opens:
        if u & ~full:
            return f"open set {u} leaves the space"
        for v in opens:
            if u | v not in opens:
                return f"union of {u} and {v} is not open"
            if u & v not in opens:
                return f"intersection of {u} and {v} is not open"
    return None


def interior(tau: Topology, Y: int) -> int:
    """Union of the opens contained in ``Y``."""
    out = 0
    for u in tau.opens:
        if u & ~Y == 0:
            out |= u
    return out


@dataclass(frozen=True)
class FiniteTopSpace:
    points: tuple[str, ...]
    topologies: tuple[Topology, ...]

    def __post_init__(self):
        if not self.points:
            raise TopologyError("a space needs at least one point")
        if not self.topologies:
            raise TopologyError("a space needs at least one topology")
        for t in self.topologies:
            if t.full != self.full:
                raise TopologyError("topology does not live on this point set")

    @classmethod
    def from_basic_opens(cls, points: Sequence[str], opens: Sequence[Iterable[int]]) -> "FiniteTopSpace":
        full = (1 << len(points)) - 1
        return cls(tuple(points), tuple(Topology.generated(full, fam) for fam in opens))

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    @property
    def agents(self) -> int:
        return len(self.topologies)

    @cached_property
    def common(self) -> Topology:
        """The intersection of all agent topologies."""
        opens = frozenset.intersection(*(t.opens for t in self.topologies))
        return Topology(self.full, opens)

    def name(self, Y: int) -> str:
        if Y == 0:
            return "-"
        return ",".join(p for k, p in enumerate(self.points) if Y >> k & 1)


# -- Kuratowski correspondence ---------------------------------------------

def kuratowski_roundtrip(n_points: int, table: Sequence[int]) -> Topology:
    """Recover the unique topology whose interior operator is ``table``."""
    full = (1 << n_points) - 1
    if len(table) != full + 1:
        raise KuratowskiError("table is total on the powerset", len(table))
    if table[full] != full:
        raise KuratowskiError("box X = X", full)
    for Y in range(full + 1):
        if table[Y] & ~Y:
            raise KuratowskiError("box Y is a subset of Y", Y)
        if table[table[Y]] != table[Y]:
            raise KuratowskiError("box box Y = box Y", Y)
    for Y in range(full + 1):
        for Z in range(Y, full + 1):
            if table[Y & Z] != table[Y] & table[Z]:
                raise KuratowskiError("box(Y & Z) = box Y & box Z", (Y, Z))
    tau = Topology(full, fixpoints(table))
    if tau.table() != tuple(table):
        raise KuratowskiError("interior of the fixpoint topology reproduces the table", tau.table())
    # any topology with this interior has exactly these opens: U open iff I(U) = U
    if fixpoints(tau.table()) != tau.opens:
        raise KuratowskiError("opens are forced by the operator", tau.opens)
    return tau


def powerset_algebra(space: FiniteTopSpace) -> FiniteAlgebra:
    """Subsets of the space with one interior operator per agent and C from the common topology."""
    return FiniteAlgebra(space.points,
                         tuple(t.table() for t in space.topologies),
                         space.common.table())


class StoneError(ValueError):
    pass


def algebra_to_topologies(A: FiniteAlgebra) -> FiniteTopSpace:
    """Recover the agent topologies of a powerset algebra and confirm C is the common interior."""
    n = len(A.atoms)
    topologies = []
    for i in range(A.agents):
        try:
            topologies.append(kuratowski_roundtrip(n, A.boxes[i]))
        except KuratowskiError as exc:
            raise StoneError(f"box{i} is not an interior operator: {exc}") from exc
    space = FiniteTopSpace(A.atoms, tuple(topologies))
    common = space.common
    for Y in A.elements:
        if A.cop(Y) != interior(common, Y):
            raise StoneError(f"C differs from the common interior at {A.name(Y)}")
    return space


# -- ultrafilters ----------------------------------------------------------

@dataclass(frozen=True)
class Ultrafilter:
    generator: int
    members: frozenset[int]

    def __contains__(self, a: int) -> bool:
        return a in self.members


def is_ultrafilter(A: FiniteAlgebra, members: Iterable[int]) -> bool:
    m = frozenset(members)
    if A.top not in m or 0 in m:
        return False
    for a in A.elements:
        if (a in m) == (A.comp(a) in m):
            return False
    for a in m:
        for b in A.elements:
            if A.leq(a, b) and b not in m:
                return False
        for b in m:
            if a & b not in m:
                return False
    return True


def algebra_atoms(A: FiniteAlgebra) -> list[int]:
    """Minimal non-zero elements, found from the order alone."""
    nonzero = [a for a in A.elements if a != 0]
    return [a for a in nonzero if not any(b != a and A.leq(b, a) for b in nonzero)]


def ultrafilters(A: FiniteAlgebra) -> list[Ultrafilter]:
    out = []
    for atom in algebra_atoms(A):
        members = frozenset(a for a in A.elements if A.leq(atom, a))
        if not is_ultrafilter(A, members):
            raise StoneError(f"principal filter at {A.name(atom)} is not an ultrafilter")
        out.append(Ultrafilter(atom, members))
    return out


def hat(ults: Sequence[Ultrafilter], a: int) -> int:
    """Bitmask over ``ults`` of the ultrafilters containing ``a``."""
    out = 0
    for k, u in enumerate(ults):
        if a in u:
            out |= 1 << k
    return out


@dataclass(frozen=True)
class CanonicalSpace:
    algebra: FiniteAlgebra
    ults: tuple[Ultrafilter, ...]
    space: FiniteTopSpace

    def hat(self, a: int) -> int:
        return hat(self.ults, a)


def topo_canonical(A: FiniteAlgebra) -> CanonicalSpace:
    """Ultrafilter space with agent i's topology generated by the hats of box_i's range."""
    ults = tuple(ultrafilters(A))
    full = (1 << len(ults)) - 1
    topologies = []
    for i in range(A.agents):
        basis = {hat(ults, A.box(i, b)) for b in A.elements}
        if full not in basis:
            raise StoneError(f"basis for agent {i} misses the whole space")
        for u in basis:
            for v in basis:
                if u & v not in basis:
                    raise StoneError(f"basis for agent {i} is not closed under intersection")
        topologies.append(Topology(full, _union_closure(basis)))
    points = tuple(f"u{A.name(u.generator)}" for u in ults)
    return CanonicalSpace(A, ults, FiniteTopSpace(points, tuple(topologies)))


def verify_representation(A: FiniteAlgebra) -> Report:
    """Check hat(box_i a) = I_i(hat a) and hat(C a) = I(hat a), plus the rank hierarchy."""
    from . import wellfound

    report = Report(subject="representation")
    cs = topo_canonical(A)
    space = cs.space
    common = space.common
    for a in A.elements:
        ha = cs.hat(a)
        for i, t in enumerate(space.topologies):
            if cs.hat(A.box(i, a)) != interior(t, ha):
                report.add(f"hat(box{i} a) = I_{i}(hat a)", A.name(a))
        hca = cs.hat(A.cop(a))
        if hca != interior(common, ha):
            report.add("hat(C a) = I(hat a)", A.name(a))
        # C a <= a & E C a makes hat(C a) an open subset of hat a in every agent topology
        if hca & ~ha or any(hca not in t for t in space.topologies):
            report.add("hat(C a) is open and below hat a", A.name(a))
    for d in A.elements:
        info = wellfound.RankTable(A, d, cs.ults)
        hd = cs.hat(d)
        box_d = full_and(interior(t, hd) for t in space.topologies)
        i_hat_d = interior(common, hd)
        for gamma in range(info.algebra_height + 1):
            jg = info.j_mask(gamma)
            jg1 = info.j_mask(gamma + 1)
            lhs = box_d & full_and(interior(t, jg) for t in space.topologies)
            if lhs & ~jg1:
                report.add("boxes of hat d and of J^g lie inside J^(g+1)", (A.name(d), gamma))
            if i_hat_d & ~jg1:
                report.add("I(hat d) inside J^(g+1)", (A.name(d), gamma))
        if info.j_mask(wellfound.INF) != cs.hat(A.cop(d)):
            report.add("J^inf = hat(C d)", A.name(d))
    return report


def model_space(m) -> FiniteTopSpace:
    """Alexandrov space of a Kripke model: agent i's opens are the R_i-up-sets."""
    opens = []
    for i in range(m.agents):
        opens.append([sum(1 << b for b in m.successors(i, w)) for w in range(m.size)])
    return FiniteTopSpace.from_basic_opens(m.worlds, opens)


def model_algebra(m) -> FiniteAlgebra:
    """Powerset algebra of the model's Alexandrov space; C comes out as the S-interior."""
    return powerset_algebra(model_space(m))


def full_and(masks: Iterable[int]) -> int:
    out = -1
    for m in masks:
        out &= m
    return out


def completion_embed(A: FiniteAlgebra) -> Report:
    """Check that hat embeds A into the powerset algebra of its canonical space, isomorphically."""
    report = Report(subject="completion")
    cs = topo_canonical(A)
    P = powerset_algebra(cs.space)
    pv = validate_algebra(P)
    for v in pv.violations:
        report.add(f"target algebra: {v.check}", v.witness, v.detail)
    image = [cs.hat(a) for a in A.elements]
    if len(set(image)) != A.size:
        report.add("hat is injective", [a for a in A.elements if image.count(image[a]) > 1][:2])
    if set(image) != set(P.elements):
        report.add("hat is onto the powerset of Ult A", sorted(set(P.elements) - set(image))[:1])
    if image[0] != 0 or image[A.top] != P.top:
        report.add("hat preserves 0 and 1", (image[0], image[A.top]))
    for a in A.elements:
        ha = image[a]
        for b in A.elements:
            hb = image[b]
            if image[a & b] != ha & hb or image[a | b] != ha | hb or image[A.imp(a, b)] != P.imp(ha, hb):
                report.add("hat is a Boolean homomorphism", (A.name(a), A.name(b)))
                break
        for i in range(A.agents):
            if image[A.box(i, a)] != P.box(i, ha):
                report.add(f"hat commutes with box{i}", A.name(a))
        if image[A.cop(a)] != P.cop(ha):
            report.add("hat commutes with C", A.name(a))
    return report


# -- file format -----------------------------------------------------------

def parse_space(text: str) -> FiniteTopSpace:
    """Read ``agents N``, ``points ...`` and ``open i: ...`` lines; closure is taken on load."""
    agents = None
    points: list[str] | None = None
    basic: dict[int, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "agents":
            agents = int(rest)
        elif head == "points":
            points = rest.split()
        elif head == "open":
            idx, colon, body = rest.partition(":")
            if not colon or points is None:
                raise TopologyError(f"line {lineno}: expected 'open i: points' after 'points'")
            mask = 0
            for p in body.split():
                if p == "-":
                    continue
                if p not in points:
                    raise TopologyError(f"line {lineno}: unknown point {p!r}")
                mask |= 1 << points.index(p)
            basic.setdefault(int(idx), []).append(mask)
        else:
            raise TopologyError(f"line {lineno}: unknown directive {head!r}")
    if agents is None or points is None:
        raise TopologyError("space file needs 'agents' and 'points' lines")
    if any(i >= agents or i < 0 for i in basic):
        raise TopologyError("open line for an undeclared agent")
    return FiniteTopSpace.from_basic_opens(points, [basic.get(i, []) for i in range(agents)])


def dump_space(space: FiniteTopSpace) -> str:
    lines = [f"agents {space.agents}", "points " + " ".join(space.points)]
    for i, t in enumerate(space.topologies):
        for u in sorted(t.opens):
            if u not in (0, space.full):
                lines.append(f"open {i}: " + " ".join(p for k, p in enumerate(space.points) if u >> k & 1))
    return "\n".join(lines) + "\n"
