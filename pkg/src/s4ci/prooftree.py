"""Finite certificates for Hilbert derivations and omega-derivations.

An omega-rule application is stored as a lasso: premises pi_0 .. pi_{k-1}
and a loop index l, with the premise family continuing l, l+1, .., k-1, l, ..
forever.  Every node carries its conclusion so a checker can point at the
first node whose formula is wrong.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .algebra import FiniteAlgebra, all_assignments, evaluate_batch
from .report import Report
from .syntax import (BOT, Box, C, Formula, FormulaSyntaxError, Imp, Var, conj, e_op,
                     parse, render, variables)

SCHEMAS = ("i", "ii", "iii", "iv", "v", "vi", "viii")
TAUTOLOGY_ATOM_CAP = 16


# -- nodes -----------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    schema: str
    instance: Formula

    @property
    def conclusion(self) -> Formula:
        return self.instance


@dataclass(frozen=True)
class Assumption:
    formula: Formula

    @property
    def conclusion(self) -> Formula:
        return self.formula


@dataclass(frozen=True)
class MP:
    major: "ProofNode"
    minor: "ProofNode"
    conclusion: Formula


@dataclass(frozen=True)
class Nec:
    child: "ProofNode"
    conclusion: Formula


@dataclass(frozen=True)
class OmegaLoop:
    psi: Formula
    premises: tuple
    loop_index: int
    conclusion: Formula

    def premise_at(self, j: int) -> int:
        """Index of the certificate premise that stands for the j-th rule premise."""
        k = len(self.premises)
        if j < k:
            return j
        return self.loop_index + (j - self.loop_index) % (k - self.loop_index)


ProofNode = Union[Axiom, Assumption, MP, Nec, OmegaLoop]


class ProofRejected(ValueError):
    def __init__(self, path: tuple, reason: str, expected=None, found=None):
        self.path = path
        self.reason = reason
        self.expected = expected
        self.found = found
        where = "/".join(map(str, path)) or "root"
        msg = f"at {where}: {reason}"
        if expected is not None or found is not None:
            msg += f" (expected {_show(expected)}, found {_show(found)})"
        super().__init__(msg)


class TautologyCapExceeded(ValueError):
    pass


def _show(x) -> str:
    if isinstance(x, (Var, type(BOT), Imp, Box, C)):
        return render(x)
    return str(x)


@dataclass(frozen=True)
class CheckOutcome:
    conclusion: Formula
    assumptions_used: frozenset


# -- axiom recognition -----------------------------------------------------

def skeleton_atoms(f: Formula) -> list[Formula]:
    """Maximal non-propositional subformulas (variables, boxes and C) in first-seen order."""
    out: list[Formula] = []

    def go(g):
        if isinstance(g, Imp):
            go(g.left)
            go(g.right)
        elif g != BOT and g not in out:
            out.append(g)

    go(f)
    return out


def is_tautology(f: Formula) -> bool:
    atoms = skeleton_atoms(f)
    if len(atoms) > TAUTOLOGY_ATOM_CAP:
        raise TautologyCapExceeded(f"{len(atoms)} propositional atoms, cap is {TAUTOLOGY_ATOM_CAP}")
    rows = np.arange(1 << len(atoms), dtype=np.int64)
    col = {a: ((rows >> k) & 1).astype(bool) for k, a in enumerate(atoms)}

    def go(g):
        if isinstance(g, Imp):
            return ~go(g.left) | go(g.right)
        if g == BOT:
            return np.zeros(rows.shape, dtype=bool)
        return col[g]

    return bool(go(f).all())


def is_instance(f: Formula, schema: str, agent_count: int) -> bool:
    if schema == "i":
        return is_tautology(f)
    if not isinstance(f, Imp):
        return False
    L, R = f.left, f.right
    if schema == "ii":
        return (isinstance(L, Box) and isinstance(L.body, Imp)
                and R == Imp(Box(L.agent, L.body.left), Box(L.agent, L.body.right)))
    if schema == "iii":
        return isinstance(L, Box) and R == Box(L.agent, L)
    if schema == "iv":
        return isinstance(L, Box) and R == L.body
    if schema == "v":
        return isinstance(L, C) and isinstance(L.body, Imp) and R == Imp(C(L.body.left), C(L.body.right))
    if schema == "vi":
        return isinstance(L, C) and R == conj(e_op(L.body, agent_count), e_op(L, agent_count))
    if schema == "viii":
        if not isinstance(R, C):
            return False
        phi = R.body
        ephi = e_op(phi, agent_count)
        return L == conj(ephi, C(Imp(phi, ephi)))
    raise ValueError(f"unknown schema {schema!r}; known: {', '.join(SCHEMAS)}")


def match_axiom(f: Formula, agent_count: int) -> str | None:
    """First schema (in list order) that ``f`` instantiates, if any."""
    for s in SCHEMAS:
        if is_instance(f, s, agent_count):
            return s
    return None


# -- checking --------------------------------------------------------------

def omega_conclusion(psi: Formula, phis: Sequence[Formula]) -> Formula:
    return Imp(phis[0], C(psi))


def omega_premise(psi: Formula, phi: Formula, phi_next: Formula, agent_count: int) -> Formula:
    return Imp(phi, conj(e_op(psi, agent_count), e_op(phi_next, agent_count)))


def check(cert: ProofNode, sigma: Iterable[Formula], agent_count: int) -> CheckOutcome:
    """Verify every node; raise ProofRejected at the first bad one (pre-order)."""
    sigma = frozenset(sigma)
    used: set[Formula] = set()

    def go(node, path: tuple) -> Formula:
        if isinstance(node, Axiom):
            if node.schema not in SCHEMAS:
                raise ProofRejected(path, "unknown axiom schema", SCHEMAS, node.schema)
            try:
                ok = is_instance(node.instance, node.schema, agent_count)
            except TautologyCapExceeded as exc:
                raise ProofRejected(path, str(exc)) from None
            if not ok:
                raise ProofRejected(path, f"not an instance of schema ({node.schema})",
                                    match_axiom(node.instance, agent_count) or "no schema", node.instance)
            return node.instance
        if isinstance(node, Assumption):
            if node.formula not in sigma:
                raise ProofRejected(path, "assumption leaf outside the premise set", "a member of sigma",
                                    node.formula)
            used.add(node.formula)
            return node.formula
        if isinstance(node, MP):
            major = go(node.major, path + ("major",))
            minor = go(node.minor, path + ("minor",))
            want = Imp(minor, node.conclusion)
            if major != want:
                raise ProofRejected(path, "major premise does not match", want, major)
            return node.conclusion
        if isinstance(node, Nec):
            child = go(node.child, path + ("child",))
            if node.conclusion != C(child):
                raise ProofRejected(path, "nec conclusion", C(child), node.conclusion)
            return node.conclusion
        if isinstance(node, OmegaLoop):
            k = len(node.premises)
            if k == 0 or not 0 <= node.loop_index < k:
                raise ProofRejected(path, "loop index out of range", f"0..{k - 1}", node.loop_index)
            got = [go(p, path + (f"premise{j}",)) for j, p in enumerate(node.premises)]
            phis = []
            for j, g in enumerate(got):
                if not isinstance(g, Imp):
                    raise ProofRejected(path, f"omega premise {j} is not an implication",
                                        "phi_j -> E psi & E phi_j+1", g)
                phis.append(g.left)
            for j, g in enumerate(got):
                want = omega_premise(node.psi, phis[j], phis[node.premise_at(j + 1)], agent_count)
                if g != want:
                    raise ProofRejected(path, f"omega premise {j} has the wrong shape", want, g)
            want = omega_conclusion(node.psi, phis)
            if node.conclusion != want:
                raise ProofRejected(path, "omega conclusion", want, node.conclusion)
            return node.conclusion
        raise ProofRejected(path, f"unknown node type {type(node).__name__}")

    concl = go(cert, ())
    return CheckOutcome(concl, frozenset(used))


def accepts(cert: ProofNode, sigma: Iterable[Formula], agent_count: int) -> bool:
    try:
        check(cert, sigma, agent_count)
    except ProofRejected:
        return False
    return True


# -- lasso utilities -------------------------------------------------------

def unfold_depth(cert: ProofNode, j: int) -> Formula:
    """Conclusion of the j-th premise of the root omega rule."""
    if not isinstance(cert, OmegaLoop):
        raise TypeError("root is not an omega node")
    if j < 0:
        raise ValueError("premise index must be non-negative")
    return cert.premises[cert.premise_at(j)].conclusion


def unroll(cert: ProofNode, m: int) -> ProofNode:
    """Spell out the first ``m`` premises of every omega node explicitly, keeping the loop."""
    if isinstance(cert, MP):
        return MP(unroll(cert.major, m), unroll(cert.minor, m), cert.conclusion)
    if isinstance(cert, Nec):
        return Nec(unroll(cert.child, m), cert.conclusion)
    if isinstance(cert, OmegaLoop):
        prem = [unroll(p, m) for p in cert.premises]
        period = len(prem) - cert.loop_index
        start = max(m, cert.loop_index)
        seq = tuple(prem[cert.premise_at(j)] for j in range(start + period))
        return OmegaLoop(cert.psi, seq, start, cert.conclusion)
    return cert


def nodes(cert: ProofNode, path: tuple = ()):
    """Pre-order walk yielding (path, node)."""
    yield path, cert
    if isinstance(cert, MP):
        yield from nodes(cert.major, path + ("major",))
        yield from nodes(cert.minor, path + ("minor",))
    elif isinstance(cert, Nec):
        yield from nodes(cert.child, path + ("child",))
    elif isinstance(cert, OmegaLoop):
        for j, p in enumerate(cert.premises):
            yield from nodes(p, path + (f"premise{j}",))


def formula_fields(node: ProofNode) -> tuple[str, ...]:
    if isinstance(node, Axiom):
        return ("instance",)
    if isinstance(node, Assumption):
        return ("formula",)
    if isinstance(node, OmegaLoop):
        return ("psi", "conclusion")
    return ("conclusion",)


def replace_at(cert: ProofNode, path: tuple, fn: Callable[[ProofNode], ProofNode]) -> ProofNode:
    if not path:
        return fn(cert)
    head, rest = path[0], path[1:]
    if head.startswith("premise"):
        j = int(head[len("premise"):])
        prem = list(cert.premises)
        prem[j] = replace_at(prem[j], rest, fn)
        return OmegaLoop(cert.psi, tuple(prem), cert.loop_index, cert.conclusion)
    kw = {f: getattr(cert, f) for f in cert.__dataclass_fields__}
    kw[head] = replace_at(kw[head], rest, fn)
    return type(cert)(**kw)


def mutations(cert: ProofNode):
    """Every certificate obtained by negating one formula field of one node."""
    for path, node in nodes(cert):
        for field in formula_fields(node):
            def fn(n, field=field):
                kw = {f: getattr(n, f) for f in n.__dataclass_fields__}
                kw[field] = Imp(kw[field], BOT)
                return type(n)(**kw)
            yield path, field, replace_at(cert, path, fn)


# -- soundness against algebras --------------------------------------------

def soundness_sweep(cert: ProofNode, sigma: Iterable[Formula], algebras: Sequence[FiniteAlgebra],
                    agent_count: int, checker: Callable = check) -> Report:
    """Every valuation making sigma all-1 must send the conclusion to 1.

    Algebras are grouped by size so each group is evaluated in one batch.
    Only algebras whose agent count matches the certificate language are used.
    """
    sigma = list(sigma)
    concl = checker(cert, sigma, agent_count).conclusion
    rep = Report("soundness sweep")
    var_ids = sorted(set().union(variables(concl), *(variables(s) for s in sigma)))
    groups: dict[int, list[FiniteAlgebra]] = {}
    for A in algebras:
        if A.agents == agent_count:
            groups.setdefault(A.size, []).append(A)
    sig = sigma or [Imp(BOT, BOT)]
    for size, algs in sorted(groups.items()):
        boxes = np.stack([A.box_array for A in algs])
        cop = np.stack([A.c_array for A in algs])
        top = np.array([A.top for A in algs])
        assign = all_assignments(size, var_ids)
        ok_sigma = np.ones((len(algs), size ** len(var_ids)), dtype=bool)
        for s in sig:
            ok_sigma &= evaluate_batch(boxes, cop, top, assign, s) == top[:, None]
        cval = evaluate_batch(boxes, cop, top, assign, concl)
        bad = ok_sigma & (cval != top[:, None])
        for ai, vi in np.argwhere(bad)[:1]:
            A = algs[int(ai)]
            val = ", ".join(f"p{v}={A.name(int(assign[v][vi]))}" for v in var_ids)
            rep.add("conclusion below 1", val, f"in algebra with atoms {','.join(A.atoms)}")
    return rep


# -- builders --------------------------------------------------------------

def ax(schema: str, f: Formula) -> Axiom:
    return Axiom(schema, f)


def asm(f: Formula) -> Assumption:
    return Assumption(f)


def mp(major: ProofNode, minor: ProofNode) -> MP:
    m = major.conclusion
    if not isinstance(m, Imp) or m.left != minor.conclusion:
        raise ValueError(f"cannot apply mp: {render(m)} to {render(minor.conclusion)}")
    return MP(major, minor, m.right)


def nec(child: ProofNode) -> Nec:
    return Nec(child, C(child.conclusion))


def taut(f: Formula) -> Axiom:
    if not is_tautology(f):
        raise ValueError(f"not a tautology: {render(f)}")
    return Axiom("i", f)


def mp_chain(f: Formula, *minors: ProofNode) -> ProofNode:
    """From tautology ``m1 -> m2 -> .. -> g`` and proofs of each m_k, prove g."""
    node: ProofNode = taut(f)
    for m in minors:
        node = mp(node, m)
    return node


def omega(psi: Formula, premises: Sequence[ProofNode], loop_index: int) -> OmegaLoop:
    phis = [p.conclusion.left for p in premises]
    return OmegaLoop(psi, tuple(premises), loop_index, omega_conclusion(psi, phis))


def assemble_global(sigma: Iterable[Formula], f: Formula, implication_proof: ProofNode,
                    agent_count: int) -> ProofNode:
    """From a proof of C(/\\sigma) -> f, build a certificate of f from assumptions sigma.

    Each member of sigma is necessitated, the C's are combined into C of the
    conjunction using C's normality, and mp finishes.
    """
    from .syntax import big_and, conj as _conj

    sigma = sorted(set(sigma), key=lambda g: render(g, exact=True))
    if not sigma:
        if implication_proof.conclusion != f:
            raise ValueError("with no assumptions the proof must conclude f itself")
        return implication_proof
    want = Imp(C(big_and(sigma)), f)
    if implication_proof.conclusion != want:
        raise ValueError("implication proof has the wrong conclusion")
    # prove C(s_1 & (s_2 & ..)) by folding from the right
    proof: ProofNode = nec(asm(sigma[-1]))
    acc = sigma[-1]
    for s in reversed(sigma[:-1]):
        # C(s -> (acc -> s & acc)) from a tautology, then two uses of (v)
        t = Imp(s, Imp(acc, _conj(s, acc)))
        ct = nec(taut(t))
        step1 = mp(ax("v", Imp(C(t), Imp(C(s), C(Imp(acc, _conj(s, acc)))))), ct)
        step2 = mp(step1, nec(asm(s)))
        step3 = mp(ax("v", Imp(C(Imp(acc, _conj(s, acc))), Imp(C(acc), C(_conj(s, acc))))), step2)
        proof = mp(step3, proof)
        acc = _conj(s, acc)
    return mp(implication_proof, proof)


# -- s-expressions ---------------------------------------------------------

_SEXP_TOKEN = re.compile(r'\s*(?:(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()"]+))')


class CertificateSyntaxError(ValueError):
    pass


def _read_sexp(text: str):
    pos = 0
    stack: list[list] = [[]]
    while True:
        m = _SEXP_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise CertificateSyntaxError(f"unexpected input at offset {pos}")
            break
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise CertificateSyntaxError(f"unbalanced ')' at offset {m.start()}")
            done = stack.pop()
            stack[-1].append(done)
        elif m.group(3) is not None:
            stack[-1].append(("str", re.sub(r"\\(.)", r"\1", m.group(3))))
        else:
            stack[-1].append(m.group(4))
    if len(stack) != 1:
        raise CertificateSyntaxError("unbalanced '('")
    if len(stack[0]) != 1:
        raise CertificateSyntaxError("expected exactly one certificate")
    return stack[0][0]


def read_certificate(text: str, agent_count: int) -> ProofNode:
    """Parse ``(ax ..)``, ``(asm ..)``, ``(mp ..)``, ``(nec ..)`` and ``(omega ..)`` forms."""
    def formula(x) -> Formula:
        if not (isinstance(x, tuple) and x[0] == "str"):
            raise CertificateSyntaxError(f"expected a quoted formula, got {x!r}")
        try:
            return parse(x[1], agent_count)
        except FormulaSyntaxError as exc:
            raise CertificateSyntaxError(str(exc)) from None

    def node(x) -> ProofNode:
        if not isinstance(x, list) or not x or not isinstance(x[0], str):
            raise CertificateSyntaxError(f"expected a proof form, got {x!r}")
        head, args = x[0], x[1:]
        arity = {"ax": 2, "asm": 1, "mp": 3, "nec": 2, "omega": 4}
        if head not in arity:
            raise CertificateSyntaxError(f"unknown form {head!r}")
        if len(args) != arity[head]:
            raise CertificateSyntaxError(f"{head} takes {arity[head]} arguments, got {len(args)}")
        if head == "ax":
            if not isinstance(args[0], str):
                raise CertificateSyntaxError("schema must be a bare word")
            return Axiom(args[0], formula(args[1]))
        if head == "asm":
            return Assumption(formula(args[0]))
        if head == "mp":
            return MP(node(args[0]), node(args[1]), formula(args[2]))
        if head == "nec":
            return Nec(node(args[0]), formula(args[1]))
        if not isinstance(args[1], list):
            raise CertificateSyntaxError("omega premises must be a list")
        try:
            loop = int(args[2])
        except (TypeError, ValueError):
            raise CertificateSyntaxError(f"bad loop index {args[2]!r}") from None
        return OmegaLoop(formula(args[0]), tuple(node(p) for p in args[1]), loop, formula(args[3]))

    return node(_read_sexp(text))


def write_certificate(cert: ProofNode, indent: int = 0) -> str:
    def q(f: Formula) -> str:
        return '"' + render(f).replace("\\", "\\\\").replace('"', '\\"') + '"'

    pad = "  " * indent
    if isinstance(cert, Axiom):
        return f"{pad}(ax {cert.schema} {q(cert.instance)})"
    if isinstance(cert, Assumption):
        return f"{pad}(asm {q(cert.formula)})"
    if isinstance(cert, MP):
        return (f"{pad}(mp\n{write_certificate(cert.major, indent + 1)}\n"
                f"{write_certificate(cert.minor, indent + 1)}\n{pad}  {q(cert.conclusion)})")
    if isinstance(cert, Nec):
        return f"{pad}(nec\n{write_certificate(cert.child, indent + 1)}\n{pad}  {q(cert.conclusion)})"
    prem = "\n".join(write_certificate(p, indent + 2) for p in cert.premises)
    return (f"{pad}(omega {q(cert.psi)}\n{pad}  (\n{prem}\n{pad}  )\n"
            f"{pad}  {cert.loop_index} {q(cert.conclusion)})")


# -- golden certificates ---------------------------------------------------

def _e_of_theorem(proof: ProofNode, agent_count: int) -> ProofNode:
    """From a proof of X (no assumptions needed) derive E X via nec and (vi)."""
    x = proof.conclusion
    ex, ecx = e_op(x, agent_count), e_op(C(x), agent_count)
    split = mp(ax("vi", Imp(C(x), conj(ex, ecx))), nec(proof))
    return mp(taut(Imp(conj(ex, ecx), ex)), split)


def _premise_from(psi_e: ProofNode, next_e: ProofNode, phi: Formula) -> ProofNode:
    """phi -> E psi & E next, given proofs of E psi and E next."""
    a, b = psi_e.conclusion, next_e.conclusion
    return mp_chain(Imp(a, Imp(b, Imp(phi, conj(a, b)))), psi_e, next_e)


@dataclass(frozen=True)
class Golden:
    name: str
    sigma: tuple
    cert: ProofNode
    agent_count: int = 2


def golden_certificates(agent_count: int = 2) -> list[Golden]:
    n = agent_count
    p0, p1 = Var(0), Var(1)
    top = Imp(BOT, BOT)
    out: list[Golden] = []

    out.append(Golden("nec-assumption", (p0,), nec(asm(p0)), n))

    e_top = _e_of_theorem(taut(top), n)
    out.append(Golden("top-implies-c-top", (), omega(top, [_premise_from(e_top, e_top, top)], 0), n))

    sig = tuple(Imp(p0, Box(i, p0)) for i in range(n))
    body = e_op(p0, n)
    t: Formula = Imp(p0, conj(body, body))
    for s in reversed(sig):
        t = Imp(s, t)
    induct = omega(p0, [mp_chain(t, *(asm(s) for s in sig))], 0)
    out.append(Golden("induction-by-omega", sig, induct, n))

    cp = C(p0)
    vi = ax("vi", Imp(cp, conj(e_op(p0, n), e_op(cp, n))))
    refl = mp_chain(Imp(vi.conclusion, Imp(Imp(Box(0, p0), p0), Imp(cp, p0))), vi, ax("iv", Imp(Box(0, p0), p0)))
    out.append(Golden("c-reflexive", (), refl, n))

    ecp = e_op(cp, n)
    trans_prem = mp_chain(Imp(vi.conclusion, Imp(cp, conj(ecp, ecp))), vi)
    out.append(Golden("c-transitive", (), omega(cp, [trans_prem], 0), n))

    # period-2 lasso: phi_0 = p0, phi_1 = top, phi_2 = p1 -> p1, phi_3 := phi_1
    refl_p1 = Imp(p1, p1)
    e_refl = _e_of_theorem(taut(refl_p1), n)
    lasso = omega(top, [_premise_from(e_top, e_top, p0),
                        _premise_from(e_top, e_refl, top),
                        _premise_from(e_top, e_top, refl_p1)], 1)
    out.append(Golden("period-two-lasso", (), lasso, n))

    if n >= 2:
        # p0 |- box0 box1 p0
        c1 = Imp(cp, Box(1, p0))
        thm = mp_chain(Imp(vi.conclusion, c1), vi)          # C p0 -> box1 p0
        box0_thm = mp(taut(Imp(e_op(c1, n), Box(0, c1))), _e_of_theorem(thm, n))
        k = mp(ax("ii", Imp(Box(0, c1), Imp(Box(0, cp), Box(0, Box(1, p0))))), box0_thm)
        cp_proof = nec(asm(p0))
        vi_cp = mp(vi, cp_proof)                             # E p0 & E C p0
        box0_cp = mp(taut(Imp(vi_cp.conclusion, Box(0, cp))), vi_cp)
        out.append(Golden("box-box-from-assumption", (p0,), mp(k, box0_cp), n))
    return out


def corrupted_checker(cert: ProofNode, sigma: Iterable[Formula], agent_count: int) -> CheckOutcome:
    """A deliberately unsound checker that trusts every node; used for fault injection."""
    used = frozenset(n.formula for _, n in nodes(cert) if isinstance(n, Assumption))
    return CheckOutcome(cert.conclusion, used)


def schema_instances(phi: Formula, psi: Formula, agent_count: int) -> dict[str, Formula]:
    """One instance of each non-propositional schema built from two formulas."""
    n = agent_count
    return {
        "ii": Imp(Box(0, Imp(phi, psi)), Imp(Box(0, phi), Box(0, psi))),
        "iii": Imp(Box(n - 1, phi), Box(n - 1, Box(n - 1, phi))),
        "iv": Imp(Box(0, phi), phi),
        "v": Imp(C(Imp(phi, psi)), Imp(C(phi), C(psi))),
        "vi": Imp(C(phi), conj(e_op(phi, n), e_op(C(phi), n))),
        "viii": Imp(conj(e_op(phi, n), C(Imp(phi, e_op(phi, n)))), C(phi)),
    }


def tautology_instances(phi: Formula, psi: Formula) -> list[Formula]:
    """A few propositional tautology shapes instantiated with the given formulas."""
    return [
        Imp(phi, Imp(psi, phi)),
        Imp(Imp(phi, Imp(psi, phi)), Imp(Imp(phi, psi), Imp(phi, phi))),
        Imp(Imp(Imp(phi, BOT), BOT), phi),
        Imp(conj(phi, psi), psi),
    ]
