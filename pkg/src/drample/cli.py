"""Command-line front end.

Exit codes: 0 every selected condition holds, 1 some condition fails,
2 input could not be parsed, 3 a precondition failed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from pathlib import Path
from typing import Callable

from . import core, esn, examples, formats, pcat, powerset
from .core import CheckReport, FiniteBiunarySemigroup, PreconditionError, Relation
from .esn import AmplePartialCategory
from .pcat import FinitePartialCategory

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    """Bad parameters for a generator or an unparsable predicate."""


class Blocked(Exception):
    """A precondition failed; carries a message and optional report."""

    def __init__(self, message: str, report: CheckReport | None = None):
        super().__init__(message)
        self.report = report


# --------------------------------------------------------------------------
# selectors


SEMIGROUP_CHECKS: dict[str, Callable] = {
    "dr": core.check_dr_axioms,
    "congruence": core.check_congruence_conditions,
    "cat-semigroup": core.check_cat_semigroup,
    "trace-cat": core.check_trace_cat,
    "ample": core.check_ample,
    "generalized-ample": core.check_generalized_ample,
    "projections-commute": core.check_projections_commute,
    "lemmas": core.verify_dr_lemmas,
}


def _pc_of(X):
    return X.pc if isinstance(X, AmplePartialCategory) else X


def _apc_check(X, k):
    if not isinstance(X, AmplePartialCategory):
        raise Blocked("apc needs an 'order' block in the input")
    return esn.check_apc(X.pc, X.order, k)


CATEGORY_CHECKS: dict[str, Callable] = {
    "partial-category": lambda X, k: pcat.check_partial_category(_pc_of(X), k),
    "category": lambda X, k: pcat.check_category(_pc_of(X), k),
    "apc": _apc_check,
}

SELECTORS = sorted(SEMIGROUP_CHECKS) + sorted(CATEGORY_CHECKS)


def run_check(X, selector: str, max_witnesses: int) -> CheckReport:
    if isinstance(X, FiniteBiunarySemigroup):
        table = SEMIGROUP_CHECKS
    else:
        table = CATEGORY_CHECKS
    if selector not in table:
        kind = "semigroup" if table is SEMIGROUP_CHECKS else "partial category"
        raise Blocked(f"{selector!r} does not apply to a {kind}")
    return table[selector](X, max_witnesses)


def exit_code(reports) -> int:
    if any(r.status == "precondition-failed" for r in reports):
        return EXIT_PRECONDITION
    return EXIT_OK if all(r.holds for r in reports) else EXIT_FAIL


# --------------------------------------------------------------------------
# output


def _label_tuple(X, elems) -> str:
    if X is None:
        return ""
    names = [X.label(i) for i in elems]
    return " = (" + ", ".join(names) + ")"


def render_human(reports, X=None) -> str:
    lines = []
    for rep in reports:
        if rep.status == "precondition-failed":
            lines.append(f"{rep.name}: precondition failed ({rep.precondition.name})")
            lines += ["  " + l for l in render_human([rep.precondition], X).splitlines()]
            continue
        lines.append(f"{rep.name}: {rep.status} ({rep.failures} failures over {rep.checked} checked)")
        for w in rep.witnesses:
            lines.append(f"  {w.law} at {tuple(w.elements)}{_label_tuple(X, w.elements)}")
        for w in rep.internal:
            lines.append(f"  INTERNAL {w.law} at {tuple(w.elements)}")
    return "\n".join(lines) + "\n"


def emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def emit_reports(args, reports, X=None, **extra) -> int:
    if args.format == "tree":
        text = formats.dumps_reports(reports, command=args.command, **extra)
    else:
        text = render_human(reports, X)
    emit(args, text)
    return exit_code(reports)


def _load(path: str):
    try:
        return formats.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# --------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    X = _load(args.path)
    reports = [run_check(X, s, args.max_witnesses) for s in args.selectors]
    return emit_reports(args, reports, X)


def cmd_derive(args) -> int:
    X = _load(args.path)
    if args.direction == "cs":
        if not isinstance(X, FiniteBiunarySemigroup):
            raise Blocked("derive cs needs a semigroup")
        out = esn.derive_CS(X)
    else:
        if not isinstance(X, AmplePartialCategory):
            raise Blocked("derive sc needs an ample partial category (with an order block)")
        out = esn.pseudoproduct(X)
    emit(args, formats.dumps(out))
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    X = _load(args.path)
    if isinstance(X, FiniteBiunarySemigroup):
        rep = esn.roundtrip_S(X)
    elif isinstance(X, AmplePartialCategory):
        rep = esn.roundtrip_C(X)
    else:
        raise Blocked("roundtrip needs a semigroup or an ample partial category")
    return emit_reports(args, [rep], X)


def _int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise UsageError(f"expected an integer, found {tok!r}") from None


def _quasiorder(kind: str, n: int) -> Relation:
    if kind == "chain":
        return pcat.chain(n)
    if kind == "antichain":
        return Relation.equality(n)
    if kind == "total":
        return Relation.from_pairs(n, [(a, b) for a in range(n) for b in range(n)])
    raise UsageError(f"unknown order family {kind!r}")


def _category(params: list[str]) -> FinitePartialCategory:
    if not params:
        raise UsageError("missing category family")
    fam, rest = params[0], params[1:]
    if fam == "posetal":
        if len(rest) != 2:
            raise UsageError("posetal takes an order family and a size")
        return pcat.posetal_category(_quasiorder(rest[0], _int(rest[1])))
    if fam == "interval":
        if len(rest) != 3:
            raise UsageError("interval takes lo hi bound")
        lo, hi, b = map(_int, rest)
        return pcat.interval_partial_category(lo, hi, b)
    if fam == "path":
        if len(rest) < 2:
            raise UsageError("path takes a vertex count, a length bound and edges a-b")
        edges = []
        for e in rest[2:]:
            m = re.fullmatch(r"(\d+)-(\d+)", e)
            if not m:
                raise UsageError(f"edges are written a-b, found {e!r}")
            edges.append((int(m[1]), int(m[2])))
        return pcat.path_category_truncation(_int(rest[0]), edges, _int(rest[1]))
    raise UsageError(f"unknown category family {fam!r}")


def _closure(params: list[str]) -> FiniteBiunarySemigroup:
    if len(params) != 2:
        raise UsageError("closure takes a kind (identity, top, chain) and a size")
    kind, k = params[0], _int(params[1])
    if kind == "identity":
        cl = examples.identity_closure(k)
    elif kind == "top":
        cl = examples.top_closure(k)
    elif kind in ("chain", "antichain", "total"):
        cl = examples.downset_closure(_quasiorder(kind, k))
    else:
        raise UsageError(f"unknown closure kind {kind!r}")
    return examples.closure_powerset(k, cl)


def s5_lines(sc: examples.IsometryScenario) -> list[str]:
    P = sc.f.parent
    return [
        f"f = {P.label(sc.f.mask)}",
        f"g = {P.label(sc.g.mask)}",
        f"fg = {P.label(sc.fg.mask)}",
        f"D(fg) = {P.label(sc.D_fg.mask)}",
        f"D(fD(g)) = {P.label(sc.D_fDg.mask)}",
    ]


def cmd_gen(args) -> int:
    fam, params = args.family, args.params
    comments = None
    if fam in ("posetal", "interval", "path"):
        X = _category([fam] + params)
    elif fam == "closure":
        X = _closure(params)
    elif fam == "pso":
        if len(params) != 2:
            raise UsageError("pso takes an order family and a size")
        X = examples.pso_semigroup(examples.QuasiOrderedSet(_quasiorder(params[0], _int(params[1]))))
    elif fam == "powerset":
        X = powerset.PowerSetSemigroup(_category(params), args.cap_subsets).materialize()
    elif fam == "pi":
        X, _ = powerset.partial_isometry_semigroup(_category(params), args.cap_subsets)
    elif fam == "s5-example":
        if params:
            raise UsageError("s5-example takes no parameters")
        sc = examples.interval_isometry_instance()
        X = sc.induced()
        comments = s5_lines(sc) + ["element 0 is f, element 1 is g"]
    else:
        raise UsageError(f"unknown family {fam!r}")
    emit(args, formats.dumps(X, comments))
    return EXIT_OK


# predicate language: flags combined with !, &&, || and parentheses

PREDICATE_FLAGS: dict[str, Callable[[FiniteBiunarySemigroup], bool]] = {
    "dr": lambda S: S.is_dr,
    "ample": lambda S: core.check_ample(S).holds,
    "congruence": lambda S: core.check_congruence_conditions(S).holds,
    "cat-semigroup": lambda S: core.check_cat_semigroup(S).holds,
    "trace-cat": lambda S: core.check_trace_cat(S).holds,
    "generalized-ample": lambda S: core.check_generalized_ample(S).holds,
    "Dcommutes": lambda S: core.check_projections_commute(S).holds,
    "BclosedDR": core.b_closed_under_dr,
    "DinB": lambda S: core.projections(S) <= core.bideterministic(S),
    "inverse": core.is_inverse_dr,
}

_TOKEN = re.compile(r"\s*(?:(&&)|(\|\|)|(!)|(\()|(\))|([A-Za-z][A-Za-z0-9-]*))")


def parse_predicate(text: str):
    """Compile a predicate into a function of a semigroup."""
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise UsageError(f"unparsable predicate at column {pos + 1}: {text[pos:]!r}")
        toks.append(next(g for g in m.groups() if g is not None))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def eat(t=None):
        nonlocal i
        tok = peek()
        if tok is None or (t is not None and tok != t):
            raise UsageError(f"unparsable predicate: expected {t or 'a term'}, found {tok!r}")
        i += 1
        return tok

    def atom():
        tok = peek()
        if tok == "!":
            eat()
            inner = atom()
            return lambda S: not inner(S)
        if tok == "(":
            eat()
            inner = disj()
            eat(")")
            return inner
        name = eat()
        if name not in PREDICATE_FLAGS:
            raise UsageError(f"unknown flag {name!r}; known: {', '.join(sorted(PREDICATE_FLAGS))}")
        return PREDICATE_FLAGS[name]

    def conj():
        parts = [atom()]
        while peek() == "&&":
            eat()
            parts.append(atom())
        return lambda S: all(p(S) for p in parts)

    def disj():
        parts = [conj()]
        while peek() == "||":
            eat()
            parts.append(conj())
        return lambda S: any(p(S) for p in parts)

    pred = disj()
    if peek() is not None:
        raise UsageError(f"unparsable predicate: trailing {peek()!r}")
    return pred


def mine(max_order: int, predicate: str) -> list[FiniteBiunarySemigroup]:
    pred = parse_predicate(predicate)
    return [S for S in examples.enumerate_dr_corpus(max_order) if pred(S)]


def cmd_mine(args) -> int:
    pred = parse_predicate(args.predicate)
    corpus = examples.enumerate_dr_corpus(args.cap_order)
    hits = [S for S in corpus if pred(S)]
    if args.format == "tree":
        body = {
            "command": "mine",
            "predicate": args.predicate,
            "max_order": args.cap_order,
            "scanned": len(corpus),
            "matches": [
                {"order": S.n, "mul": S.mul.tolist(), "D": S.d.tolist(), "R": S.r.tolist()}
                for S in hits
            ],
        }
        emit(args, json.dumps(body, indent=2, sort_keys=True) + "\n")
    else:
        parts = [f"# {len(hits)} of {len(corpus)} members of order <= {args.cap_order} satisfy {args.predicate}\n"]
        for k, S in enumerate(hits):
            parts.append(formats.dumps(S, [f"match {k}: order {S.n}"]))
        emit(args, "\n".join(parts))
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.action != "build":
        raise UsageError(f"unknown corpus action {args.action!r}")
    files = examples.corpus_files(args.cap_order, args.cap_order)
    manifest = [f"{hashlib.sha256(t.encode()).hexdigest()} {rel}" for rel, t in sorted(files.items())]
    if args.out:
        root = Path(args.out)
        for rel, text in files.items():
            path = root / "corpus" / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
    sys.stdout.write("\n".join(manifest) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, found {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("caps must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "tree"), default="human")
    common.add_argument("--max-witnesses", type=_positive, default=core.DEFAULT_MAX_WITNESSES)
    common.add_argument("--cap-subsets", type=_positive, default=powerset.DEFAULT_SUBSET_CAP)
    common.add_argument("--cap-order", type=_positive, default=3)
    common.add_argument("--out", default=None)
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="drample", description="Check and build finite DR-semigroups and ample partial categories.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run condition checkers on a structure file")
    c.add_argument("path")
    c.add_argument("selectors", nargs="+", choices=SELECTORS, metavar="SELECTOR")
    c.set_defaults(run=cmd_check)

    d = sub.add_parser("derive", parents=[common], help="C(S) from a semigroup or S(C) from an APC")
    d.add_argument("direction", choices=("cs", "sc"))
    d.add_argument("path")
    d.set_defaults(run=cmd_derive)

    g = sub.add_parser("gen", parents=[common], help="generate an example structure")
    g.add_argument("family")
    g.add_argument("params", nargs="*")
    g.set_defaults(run=cmd_gen)

    r = sub.add_parser("roundtrip", parents=[common], help="compare S(C(S)) with S or C(S(C)) with C")
    r.add_argument("path")
    r.set_defaults(run=cmd_roundtrip)

    m = sub.add_parser("mine", parents=[common], help="scan the corpus with a flag predicate")
    m.add_argument("predicate")
    m.set_defaults(run=cmd_mine)

    k = sub.add_parser("corpus", parents=[common], help="write the enumerated corpus")
    k.add_argument("action", choices=("build",))
    k.set_defaults(run=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except formats.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, Blocked, powerset.CapExceeded) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        rep = getattr(exc, "report", None)
        if rep is not None:
            sys.stderr.write(render_human([rep]))
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
