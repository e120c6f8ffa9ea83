"""Command-line entry point: ``s4ci <command> ...``.

Exit codes: 0 success or Valid, 1 a negative answer (invalid, refuted,
rejected), 2 a resource cap was hit, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable

from . import decide as dec
from . import wellfound
from .algebra import (MAX_ATOMS, AlgebraError, FiniteAlgebra, gfp_ce, parse_algebra,
                      validate_algebra)
from .corpus import FIXTURES, load_fixture
from .kripke import KripkeModel, ModelError, dump_model, parse_model, satisfies, validate_model
from .prooftree import CertificateSyntaxError, ProofRejected, check, read_certificate
from .stone import (FiniteTopSpace, StoneError, TopologyError, completion_embed,
                    parse_space, powerset_algebra, verify_representation)
from .syntax import FormulaSyntaxError, closure, depth, parse, render, size

EXIT_OK, EXIT_NEGATIVE, EXIT_CAP, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class Config:
    agents: int
    seed: int
    cap_closure: int
    cap_sets: int
    fmt: str

    def caps(self) -> dict:
        return {"cap_closure": self.cap_closure, "cap_sets": self.cap_sets}


class Output:
    """Text lines or JSON records, written in call order."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, text: str, **record) -> None:
        if self.fmt == "records":
            self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        else:
            self.stream.write(text + "\n")


# -- loading ---------------------------------------------------------------

def _read(path: str) -> str | None:
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    return None


def _load(path: str, parser: Callable, kind: type, label: str):
    text = _read(path)
    if text is None:
        if path in FIXTURES:
            obj = load_fixture(path)
            if isinstance(obj, kind):
                return obj
            raise InputError(f"fixture {path!r} is not a {label}")
        raise InputError(f"no such file or fixture: {path}")
    try:
        return parser(text)
    except (ValueError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_algebra(path: str) -> FiniteAlgebra:
    return _load(path, parse_algebra, FiniteAlgebra, "algebra")


def load_model(path: str) -> KripkeModel:
    return _load(path, parse_model, KripkeModel, "model")


def load_space(path: str) -> FiniteTopSpace:
    return _load(path, parse_space, FiniteTopSpace, "space")


def load_formula(text: str, agents: int):
    try:
        return parse(text, agents)
    except FormulaSyntaxError as exc:
        raise InputError(str(exc)) from None


def load_formula_file(path: str | None, agents: int) -> list:
    """One formula per line; blank lines and ``#`` comments are skipped."""
    if path is None:
        return []
    text = _read(path)
    if text is None:
        raise InputError(f"no such file: {path}")
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            try:
                out.append(parse(line, agents))
            except FormulaSyntaxError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
    return out


def _require_valid(A: FiniteAlgebra) -> None:
    rep = validate_algebra(A)
    if not rep.ok:
        raise InputError("algebra fails validation: " + rep.lines()[0])


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# -- commands --------------------------------------------------------------

def cmd_parse(args, cfg: Config, out: Output) -> int:
    f = load_formula(args.formula, cfg.agents)
    text = render(f, exact=args.exact, agent_count=cfg.agents)
    cl = len(closure(f, cfg.agents))
    out.emit(f"{text}\nsize={size(f)} depth={depth(f)} closure={cl}",
             formula=text, size=size(f), depth=depth(f), closure=cl)
    return EXIT_OK


def cmd_model_validate(args, cfg, out) -> int:
    m = load_model(args.file)
    rep = validate_model(m)
    for v in rep.violations:
        out.emit(str(v), check=v.check, witness=str(v.witness))
    out.emit(f"valid={str(rep.ok).lower()}", valid=rep.ok, worlds=m.size)
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_model_check(args, cfg, out) -> int:
    m = load_model(args.file)
    rep = validate_model(m)
    if not rep.ok:
        raise InputError("model fails validation: " + rep.lines()[0])
    f = load_formula(args.formula, m.agents)
    if args.world is not None:
        try:
            worlds = [m.index(args.world)]
        except (KeyError, ValueError, ModelError):
            raise InputError(f"unknown world {args.world!r}") from None
    else:
        worlds = list(range(m.size))
    ok = True
    for w in worlds:
        t = satisfies(m, w, f)
        ok &= t
        out.emit(f"{m.worlds[w]}: {str(t).lower()}", world=m.worlds[w], holds=t)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_algebra_validate(args, cfg, out) -> int:
    A = load_algebra(args.file)
    rep = validate_algebra(A)
    for v in rep.violations:
        out.emit(str(v), check=v.check, witness=str(v.witness), detail=v.detail)
    out.emit(f"valid={str(rep.ok).lower()}", valid=rep.ok, elements=A.size)
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def _elements(A: FiniteAlgebra, which: str | None) -> list[int]:
    if which is None:
        return list(A.elements)
    try:
        return [A.element(which)]
    except AlgebraError as exc:
        raise InputError(str(exc)) from None


def cmd_algebra_gfp(args, cfg, out) -> int:
    A = load_algebra(args.file)
    _require_valid(A)
    ok = True
    for a in _elements(A, args.element):
        g, c = gfp_ce(A, a), A.cop(a)
        ok &= g == c
        out.emit(f"a={A.name(a)} gfp={A.name(g)} C={A.name(c)} equal={str(g == c).lower()}",
                 a=A.name(a), gfp=A.name(g), c=A.name(c), equal=g == c)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_algebra_heights(args, cfg, out) -> int:
    A = load_algebra(args.file)
    _require_valid(A)
    for d in _elements(A, args.d):
        hm = wellfound.heights(wellfound.build_prec(A, d))
        for a in A.elements:
            h = hm[a]
            shown = "inf" if h == wellfound.INF else str(h)
            out.emit(f"d={A.name(d)} a={A.name(a)} ht={shown}", d=A.name(d), a=A.name(a), height=shown)
    return EXIT_OK


def cmd_algebra_standard(args, cfg, out) -> int:
    A = load_algebra(args.file)
    # standardness can only fail on an invalid algebra, so do not refuse those here
    rep = validate_algebra(A)
    if not rep.ok:
        out.emit(f"warning: algebra fails validation: {rep.lines()[0]}", warning=rep.lines()[0])
    res = wellfound.check_standard(A)
    for s in res.per_d:
        mh = "inf" if s.max_height == wellfound.INF else str(s.max_height)
        out.emit(f"d={A.name(s.d)} acc={s.accessible} maxht={mh} standard={str(s.standard).lower()}",
                 d=A.name(s.d), acc=s.accessible, maxht=mh, standard=s.standard)
    if args.witness and res.witness is not None:
        w = res.witness
        seq = " ".join(A.name(a) for a in w.sequence)
        out.emit(f"witness d={A.name(w.d)} sequence={seq} loop={w.loop}",
                 witness_d=A.name(w.d), sequence=[A.name(a) for a in w.sequence], loop=w.loop)
    return EXIT_OK if res.standard else EXIT_NEGATIVE


def _report_command(check_fn):
    def run(args, cfg, out) -> int:
        A = load_algebra(args.file)
        _require_valid(A)
        rep = check_fn(A)
        for v in rep.violations:
            out.emit(str(v), check=v.check, witness=str(v.witness))
        out.emit(f"{rep.subject} ok={str(rep.ok).lower()}", subject=rep.subject, ok=rep.ok)
        return EXIT_OK if rep.ok else EXIT_NEGATIVE
    return run


def cmd_space_to_algebra(args, cfg, out) -> int:
    from .algebra import dump_algebra

    space = load_space(args.file)
    if len(space.points) > MAX_ATOMS:
        raise InputError(f"space has more than {MAX_ATOMS} points")
    A = powerset_algebra(space)
    text = dump_algebra(A)
    if args.out:
        _write(args.out, text)
    rep = validate_algebra(A)
    out.emit(text.rstrip() if not args.out else f"wrote {args.out}",
             algebra=text, valid=rep.ok)
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def _verdict(res: dec.DecisionResult, args, out: Output, query) -> int:
    shown = render(query, agent_count=res.countermodel.agents if res.countermodel else None)
    if res.valid:
        out.emit(f"Valid: {shown}", verdict="Valid", formula=shown)
        return EXIT_OK
    m = res.countermodel
    text = dump_model(m)
    if args.countermodel:
        _write(args.countermodel, text)
    out.emit(f"Invalid: {shown}\ncountermodel world={m.worlds[res.world]}\n{text.rstrip()}",
             verdict="Invalid", formula=shown, world=m.worlds[res.world], countermodel=text)
    return EXIT_NEGATIVE


def cmd_decide(args, cfg, out) -> int:
    f = load_formula(args.formula, cfg.agents)
    res = dec.decide_valid(f, cfg.agents, method=args.method, **cfg.caps())
    return _verdict(res, args, out, f)


def cmd_consequence(args, cfg, out) -> int:
    f = load_formula(args.formula, cfg.agents)
    sigma = load_formula_file(args.sigma, cfg.agents)
    gamma = load_formula_file(args.gamma, cfg.agents)
    if args.mode == "local":
        if sigma:
            raise InputError("--local takes only --gamma")
        query = dec.local_query(gamma, f)
    elif args.mode == "global":
        if gamma:
            raise InputError("--global takes only --sigma")
        query = dec.global_query(sigma, f)
    else:
        query = dec.mixed_query(sigma, gamma, f)
    res = dec.decide_valid(query, cfg.agents, **cfg.caps())
    return _verdict(res, args, out, query)


def cmd_proof_check(args, cfg, out) -> int:
    text = _read(args.cert)
    if text is None:
        raise InputError(f"no such file: {args.cert}")
    sigma = load_formula_file(args.sigma, cfg.agents)
    try:
        cert = read_certificate(text, cfg.agents)
    except CertificateSyntaxError as exc:
        raise InputError(f"{args.cert}: {exc}") from None
    try:
        res = check(cert, sigma, cfg.agents)
    except ProofRejected as exc:
        where = "/".join(exc.path) or "root"
        out.emit(f"rejected {exc}", accepted=False, path=where, reason=exc.reason,
                 expected=str(exc.expected), found=str(exc.found))
        return EXIT_NEGATIVE
    used = sorted(render(g) for g in res.assumptions_used)
    out.emit(f"accepted: {render(res.conclusion, agent_count=cfg.agents)}\nassumptions: {', '.join(used) or '-'}",
             accepted=True, conclusion=render(res.conclusion), assumptions=used)
    return EXIT_OK


def cmd_suite(args, cfg, out) -> int:
    from .suites import SUITES

    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError:
            raise InputError("--only takes a comma-separated list of criterion numbers") from None
    out.emit(f"seed={cfg.seed}", seed=cfg.seed)
    ok = True
    for s in SUITES:
        if only is not None and s.number not in only:
            continue
        r = s(cfg.seed)
        ok &= r.passed
        out.emit(r.line() + (f" ({r.notes})" if r.notes else ""), **r.record())
    return EXIT_OK if ok else EXIT_NEGATIVE


# -- argument parsing ------------------------------------------------------

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--agents", type=_positive, default=argparse.SUPPRESS,
                   help="number of agents for formulas (default 2)")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized suites (default 0)")
    g.add_argument("--cap-closure", type=_positive, default=argparse.SUPPRESS,
                   help=f"largest closure the decision procedure accepts (default {dec.DEFAULT_CAP_CLOSURE})")
    g.add_argument("--cap-sets", type=_positive, default=argparse.SUPPRESS,
                   help=f"largest number of sets it may build (default {dec.DEFAULT_CAP_SETS})")
    g.add_argument("--format", choices=("text", "records"), default=argparse.SUPPRESS,
                   help="plain text or one JSON record per line")

    top = _Parser(prog="s4ci", description="Common knowledge logic toolkit.", parents=[common])
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(parent, name, fn, help_text):
        p = parent.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(fn=fn)
        return p

    p = add(sub, "parse", cmd_parse, "parse and pretty-print a formula")
    p.add_argument("formula")
    p.add_argument("--exact", action="store_true", help="print primitive connectives only")

    model = sub.add_parser("model", help="Kripke model commands").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = add(model, "validate", cmd_model_validate, "check reflexivity, transitivity and S")
    p.add_argument("file")
    p = add(model, "check", cmd_model_check, "evaluate a formula at worlds of a model")
    p.add_argument("file")
    p.add_argument("formula")
    p.add_argument("--world")

    alg = sub.add_parser("algebra", help="finite algebra commands").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = add(alg, "validate", cmd_algebra_validate, "check every algebra axiom")
    p.add_argument("file")
    p = add(alg, "gfp", cmd_algebra_gfp, "compare the greatest fixpoint with C")
    p.add_argument("file")
    p.add_argument("element", nargs="?")
    p = add(alg, "heights", cmd_algebra_heights, "heights for each d")
    p.add_argument("file")
    p.add_argument("--d")
    p = add(alg, "standard", cmd_algebra_standard, "standardness report, one line per d")
    p.add_argument("file")
    p.add_argument("--witness", action="store_true", help="print a descending sequence on failure")
    p = add(alg, "represent", _report_command(verify_representation), "check the ultrafilter representation")
    p.add_argument("file")
    p = add(alg, "complete", _report_command(completion_embed), "check the embedding into its completion")
    p.add_argument("file")

    space = sub.add_parser("space", help="topological space commands").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = add(space, "to-algebra", cmd_space_to_algebra, "powerset algebra of a multitopological space")
    p.add_argument("file")
    p.add_argument("--out")

    p = add(sub, "decide", cmd_decide, "decide validity of a formula")
    p.add_argument("formula")
    p.add_argument("--countermodel", help="write the countermodel here when invalid")
    p.add_argument("--method", choices=("auto", "full", "lazy"), default="auto")

    p = add(sub, "consequence", cmd_consequence, "local, global or mixed derivability")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--local", dest="mode", action="store_const", const="local")
    mode.add_argument("--global", dest="mode", action="store_const", const="global")
    mode.add_argument("--mixed", dest="mode", action="store_const", const="mixed")
    p.set_defaults(mode="mixed")
    p.add_argument("--sigma", help="file of global premises")
    p.add_argument("--gamma", help="file of local premises")
    p.add_argument("formula")
    p.add_argument("--countermodel")

    proof = sub.add_parser("proof", help="certificate commands").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = add(proof, "check", cmd_proof_check, "check an s-expression certificate")
    p.add_argument("cert")
    p.add_argument("--sigma")

    p = add(sub, "suite", cmd_suite, "run the acceptance property suites")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return top


def run(argv=None, stream=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = Config(agents=getattr(args, "agents", 2), seed=getattr(args, "seed", 0),
                 cap_closure=getattr(args, "cap_closure", dec.DEFAULT_CAP_CLOSURE),
                 cap_sets=getattr(args, "cap_sets", dec.DEFAULT_CAP_SETS),
                 fmt=getattr(args, "format", "text"))
    out = Output(cfg.fmt, stream)
    try:
        return args.fn(args, cfg, out)
    except InputError as exc:
        print(f"s4ci: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AlgebraError, ModelError, TopologyError, StoneError, ValueError) as exc:
        print(f"s4ci: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except dec.ResourceCapExceeded as exc:
        print(f"s4ci: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except OSError as exc:
        print(f"s4ci: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
