"""Line-oriented text formats.

Semigroups::

    drsemigroup
    order 3
    mul
    0 0 0
    0 1 1
    0 1 2
    D 0 1 2
    R 0 1 2
    labels a b c

Partial categories use the header ``partialcategory``, a ``comp`` block with
``-`` for undefined products, and an optional ``idorder`` block of ``e f``
pairs.  An ``order`` line with no argument starts the pair block of an
ample partial category.  ``#`` starts a comment anywhere on a line.
"""
from __future__ import annotations

import json
from pathlib import Path

from .core import CheckReport, FiniteBiunarySemigroup, Relation, Witness
from .esn import AmplePartialCategory
from .pcat import UNDEFINED, FinitePartialCategory

Structure = FiniteBiunarySemigroup | FinitePartialCategory | AmplePartialCategory


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class _Token(str):
    line: int
    col: int


def _tokenize(text: str) -> list[list[_Token]]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in body.split():
            col = body.index(part, col)
            t = _Token(part)
            t.line, t.col = lineno, col + 1
            toks.append(t)
            col += len(part)
        if toks:
            rows.append(toks)
    return rows


class _Reader:
    def __init__(self, text: str):
        self.rows = _tokenize(text)
        self.pos = 0
        self.last_line = len(text.splitlines()) + 1

    def peek(self) -> list[_Token] | None:
        return self.rows[self.pos] if self.pos < len(self.rows) else None

    def take(self, what: str) -> list[_Token]:
        row = self.peek()
        if row is None:
            raise ParseError(f"unexpected end of input, expected {what}", self.last_line)
        self.pos += 1
        return row

    def keyword(self, word: str, nargs: int | None = None) -> list[_Token]:
        row = self.take(word)
        if row[0] != word:
            raise ParseError(f"expected {word!r}, found {row[0]!r}", row[0].line, row[0].col)
        if nargs is not None and len(row) - 1 != nargs:
            tok = row[nargs + 1] if len(row) > nargs + 1 else row[-1]
            raise ParseError(f"{word!r} takes {nargs} values, found {len(row) - 1}", tok.line, tok.col)
        return row[1:]


def _index(tok: _Token, n: int, allow_undefined: bool = False) -> int:
    if allow_undefined and tok == "-":
        return UNDEFINED
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"expected an element index, found {tok!r}", tok.line, tok.col) from None
    if not 0 <= v < n:
        raise ParseError(f"index {v} out of range 0..{n - 1}", tok.line, tok.col)
    return v


def _size(rd: _Reader) -> int:
    (tok,) = rd.keyword("order", 1)
    try:
        n = int(tok)
    except ValueError:
        raise ParseError(f"order must be an integer, found {tok!r}", tok.line, tok.col) from None
    if n < 1:
        raise ParseError("order must be positive", tok.line, tok.col)
    return n


def _table(rd: _Reader, word: str, n: int, allow_undefined: bool) -> list[list[int]]:
    rd.keyword(word, 0)
    rows = []
    for _ in range(n):
        row = rd.take(f"a row of {word}")
        if len(row) != n:
            tok = row[n] if len(row) > n else row[-1]
            raise ParseError(f"{word} row needs {n} entries, found {len(row)}", tok.line, tok.col)
        rows.append([_index(t, n, allow_undefined) for t in row])
    return rows


def _vector(rd: _Reader, word: str, n: int) -> list[int]:
    return [_index(t, n) for t in rd.keyword(word, n)]


def _labels(rd: _Reader, n: int):
    row = rd.peek()
    if row is None or row[0] != "labels":
        return None
    return tuple(str(t) for t in rd.keyword("labels", n))


def _pairs(rd: _Reader, word: str, n: int) -> list[tuple[int, int]]:
    rd.keyword(word, 0)
    out = []
    while (row := rd.peek()) is not None and row[0] not in ("idorder", "order"):
        rd.pos += 1
        if len(row) != 2:
            tok = row[2] if len(row) > 2 else row[-1]
            raise ParseError(f"{word} lines hold one pair, found {len(row)} values", tok.line, tok.col)
        out.append((_index(row[0], n), _index(row[1], n)))
    return out


def _wrap(build, row_tok: _Token):
    try:
        return build()
    except ValueError as exc:
        raise ParseError(str(exc), row_tok.line, row_tok.col) from None


def loads(text: str) -> Structure:
    rd = _Reader(text)
    head = rd.take("a header")
    kind = head[0]
    if len(head) != 1 or kind not in ("drsemigroup", "partialcategory"):
        raise ParseError(f"unknown header {kind!r}", kind.line, kind.col)
    n = _size(rd)
    if kind == "drsemigroup":
        mul = _table(rd, "mul", n, False)
        d = _vector(rd, "D", n)
        r = _vector(rd, "R", n)
        labels = _labels(rd, n)
        out = _wrap(lambda: FiniteBiunarySemigroup(mul, d, r, labels), head[0])
    else:
        comp = _table(rd, "comp", n, True)
        d = _vector(rd, "D", n)
        r = _vector(rd, "R", n)
        labels = _labels(rd, n)
        id_order = order = None
        row = rd.peek()
        if row is not None and row[0] == "idorder":
            id_order = Relation.from_pairs(n, _pairs(rd, "idorder", n))
        row = rd.peek()
        if row is not None and row[0] == "order":
            order = Relation.from_pairs(n, _pairs(rd, "order", n))
        pc = _wrap(lambda: FinitePartialCategory(comp, d, r, id_order, labels), head[0])
        if order is not None:
            if id_order is None:
                id_order = order.restrict(pc.identities)
                pc = FinitePartialCategory(comp, d, r, id_order, labels)
            out = AmplePartialCategory(pc, order)
        else:
            out = pc
    extra = rd.peek()
    if extra is not None:
        raise ParseError(f"unexpected {extra[0]!r}", extra[0].line, extra[0].col)
    return out


def load(path: Path | str) -> Structure:
    return loads(Path(path).read_text())


def _check_labels(labels) -> None:
    for s in labels:
        if not s or any(c.isspace() for c in s) or "#" in s:
            raise ValueError(f"label {s!r} cannot be written as a single token")


def _rows(table, undefined=False) -> list[str]:
    fmt = (lambda v: "-" if v == UNDEFINED else str(v)) if undefined else str
    return [" ".join(fmt(int(v)) for v in row) for row in table]


def _pair_lines(rel: Relation) -> list[str]:
    return [f"{a} {b}" for a, b in rel.pairs()]


def dumps(X: Structure, comments: list[str] | None = None) -> str:
    """Canonical text; identical structures give identical bytes."""
    lines = [f"# {c}" for c in comments or []]
    if isinstance(X, FiniteBiunarySemigroup):
        lines += ["drsemigroup", f"order {X.n}", "mul", *_rows(X.mul)]
        d, r, labels = X.d, X.r, X.labels
    else:
        pc = X.pc if isinstance(X, AmplePartialCategory) else X
        lines += ["partialcategory", f"order {pc.n}", "comp", *_rows(pc.comp, True)]
        d, r, labels = pc.d, pc.r, pc.labels
    lines.append("D " + " ".join(str(int(v)) for v in d))
    lines.append("R " + " ".join(str(int(v)) for v in r))
    if labels is not None:
        _check_labels(labels)
        lines.append("labels " + " ".join(labels))
    if isinstance(X, AmplePartialCategory):
        lines += ["order", *_pair_lines(X.order)]
    elif isinstance(X, FinitePartialCategory) and X.id_order is not None:
        lines += ["idorder", *_pair_lines(X.id_order)]
    return "\n".join(lines) + "\n"


def dump(X: Structure, path: Path | str, comments: list[str] | None = None) -> None:
    Path(path).write_text(dumps(X, comments))


# --------------------------------------------------------------------------
# reports as a JSON tree


def report_to_tree(rep: CheckReport) -> dict:
    return {
        "name": rep.name,
        "status": rep.status,
        "holds": rep.holds,
        "failures": rep.failures,
        "checked": rep.checked,
        "witnesses": [{"law": w.law, "elements": list(w.elements)} for w in rep.witnesses],
        "internal": [{"law": w.law, "elements": list(w.elements)} for w in rep.internal],
        "precondition": None if rep.precondition is None else report_to_tree(rep.precondition),
    }


def report_from_tree(tree: dict) -> CheckReport:
    wit = lambda ws: tuple(Witness(w["law"], tuple(w["elements"])) for w in ws)  # noqa: E731
    pre = tree.get("precondition")
    return CheckReport(
        tree["name"],
        bool(tree["holds"]),
        wit(tree["witnesses"]),
        int(tree["failures"]),
        int(tree["checked"]),
        None if pre is None else report_from_tree(pre),
        wit(tree.get("internal", ())),
    )


def dumps_reports(reports, **extra) -> str:
    body = dict(extra)
    body["reports"] = [report_to_tree(r) for r in reports]
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def loads_reports(text: str) -> list[CheckReport]:
    return [report_from_tree(t) for t in json.loads(text)["reports"]]
