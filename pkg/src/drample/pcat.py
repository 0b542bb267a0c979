"""Finite partial categories in object-free form.

Identities are ordinary elements with ``d(e) = r(e) = e``.  Undefined
composites are stored as :data:`UNDEFINED`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DEFAULT_MAX_WITNESSES,
    CheckReport,
    Law,
    PreconditionError,
    Relation,
    run_laws,
)

UNDEFINED = -1


class NotSaturated(ValueError):
    def __init__(self, a: int, b: int, product: int):
        super().__init__(f"{a}*{b} = {product} lies in the subset but a factor does not")
        self.a, self.b, self.product = a, b, product


class NotPreorder(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FinitePartialCategory:
    comp: np.ndarray
    d: np.ndarray
    r: np.ndarray
    id_order: Relation | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        comp = np.array(self.comp, dtype=np.intp)
        if comp.ndim != 2 or comp.shape[0] != comp.shape[1] or comp.shape[0] < 1:
            raise ValueError("comp must be a non-empty square table")
        n = comp.shape[0]
        if (comp < UNDEFINED).any() or (comp >= n).any():
            raise ValueError(f"comp entries must be UNDEFINED or in 0..{n - 1}")
        comp.flags.writeable = False
        object.__setattr__(self, "comp", comp)
        for name in ("d", "r"):
            a = np.array(getattr(self, name), dtype=np.intp)
            if a.shape != (n,) or (a < 0).any() or (a >= n).any():
                raise ValueError(f"{name.upper()} must map every element into 0..{n - 1}")
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if self.id_order is not None and self.id_order.n != n:
            raise ValueError("id_order has the wrong size")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n:
                raise ValueError("labels must name every element")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.comp.shape[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FinitePartialCategory)
            and np.array_equal(self.comp, other.comp)
            and np.array_equal(self.d, other.d)
            and np.array_equal(self.r, other.r)
            and self.identity_order == other.identity_order
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"FinitePartialCategory(n={self.n})"

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def op(self, a: int, b: int) -> int | None:
        c = int(self.comp[a, b])
        return None if c == UNDEFINED else c

    @cached_property
    def identities(self) -> np.ndarray:
        return np.unique(np.concatenate([self.d, self.r]))

    @cached_property
    def identity_order(self) -> Relation:
        """The order on identities; equality when none was given."""
        if self.id_order is None:
            return Relation.equality(self.n, self.identities)
        return self.id_order

    @cached_property
    def defined(self) -> np.ndarray:
        return self.comp != UNDEFINED

    @cached_property
    def ext(self) -> np.ndarray:
        """comp with an absorbing sentinel ``n`` standing for undefined."""
        n = self.n
        e = np.full((n + 1, n + 1), n, dtype=np.intp)
        e[:n, :n] = np.where(self.defined, self.comp, n)
        return e

    def domain(self, kind: str) -> np.ndarray:
        if kind == "all":
            return np.arange(self.n)
        if kind == "ident":
            return self.identities
        raise KeyError(kind)

    @cached_property
    def partial_category_report(self) -> CheckReport:
        return check_partial_category(self)


def _safe(a: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return a[np.where(idx < 0, 0, idx)]


def _comp_d(C, x, y):
    c = C.comp[x, y]
    return (c == UNDEFINED) | (_safe(C.d, c) == C.d[x])


def _comp_r(C, x, y):
    c = C.comp[x, y]
    return (c == UNDEFINED) | (_safe(C.r, c) == C.r[y])


def _idorder_only_identities(C, x, y):
    ident = np.zeros(C.n, dtype=bool)
    ident[C.identities] = True
    return ~C.identity_order.m[x, y] | (ident[x] & ident[y])


def _transitive(C, e, f, g):
    m = C.identity_order.m
    return ~(m[e, f] & m[f, g]) | m[e, g]


PC_LAWS = (
    Law("PC1-D", ("all",), lambda C, x: C.comp[C.d[x], x] == x),
    Law("PC1-R", ("all",), lambda C, x: C.comp[x, C.r[x]] == x),
    Law("PC2", ("all", "all"), lambda C, x, y: (C.comp[x, y] == UNDEFINED) | (C.r[x] == C.d[y])),
    Law(
        "PC3",
        ("all", "all", "all"),
        lambda C, x, y, z: C.ext[C.ext[x, y], z] == C.ext[x, C.ext[y, z]],
    ),
    Law("identity-D", ("all",), lambda C, x: C.r[C.d[x]] == C.d[x]),
    Law("identity-R", ("all",), lambda C, x: C.d[C.r[x]] == C.r[x]),
    Law("composite-D", ("all", "all"), _comp_d),
    Law("composite-R", ("all", "all"), _comp_r),
    Law("idorder-support", ("all", "all"), _idorder_only_identities),
    Law("idorder-reflexive", ("ident",), lambda C, e: C.identity_order.m[e, e]),
    Law(
        "idorder-antisymmetric",
        ("ident", "ident"),
        lambda C, e, f: ~(C.identity_order.m[e, f] & C.identity_order.m[f, e]) | (e == f),
    ),
    Law("idorder-transitive", ("ident", "ident", "ident"), _transitive),
)

CATEGORY_LAWS = (
    Law(
        "category",
        ("all", "all"),
        lambda C, x, y: C.defined[x, y] == (C.r[x] == C.d[y]),
    ),
)

PCAT_LAWS: dict[str, Law] = {law.name: law for law in PC_LAWS + CATEGORY_LAWS}


def check_partial_category(C: FinitePartialCategory, max_witnesses=DEFAULT_MAX_WITNESSES):
    """PC1-PC3, their derived consequences, and the identity order."""
    return run_laws("partial-category", C, PC_LAWS, max_witnesses)


def check_category(C: FinitePartialCategory, max_witnesses=DEFAULT_MAX_WITNESSES):
    pc = C.partial_category_report
    if not pc.holds:
        return CheckReport.blocked("category", pc)
    return run_laws("category", C, CATEGORY_LAWS, max_witnesses)


def is_category(C: FinitePartialCategory) -> bool:
    report = check_category(C)
    if report.precondition is not None:
        raise PreconditionError("not a partial category", report.precondition)
    return report.holds


# --------------------------------------------------------------------------
# saturated subsets


class SaturatedSubset:
    """A saturated subset of a category, validated on construction."""

    def __init__(self, parent: FinitePartialCategory, members: Iterable[int] | np.ndarray):
        if not is_category(parent):
            raise PreconditionError("saturated subsets live in a category")
        mask = np.zeros(parent.n, dtype=bool)
        if not isinstance(members, np.ndarray):
            members = np.array(sorted(members) if isinstance(members, (set, frozenset)) else list(members))
        if members.dtype == bool:
            mask[:] = members
        else:
            mask[members.astype(np.intp)] = True
        a, b = np.nonzero(parent.defined)
        c = parent.comp[a, b]
        bad = mask[c] & ~(mask[a] & mask[b])
        if bad.any():
            i = int(np.argmax(bad))
            raise NotSaturated(int(a[i]), int(b[i]), int(c[i]))
        self.parent = parent
        self.members = mask
        self.members.flags.writeable = False

    def induced(self) -> FinitePartialCategory:
        """Restricted composition, defined only when the product stays inside."""
        P = self.parent
        keep = np.flatnonzero(self.members)
        new = np.full(P.n, -1, dtype=np.intp)
        new[keep] = np.arange(len(keep))
        sub = P.comp[np.ix_(keep, keep)]
        # products leaving the subset map to -1, i.e. UNDEFINED
        comp = np.where(sub >= 0, new[np.where(sub >= 0, sub, 0)], UNDEFINED)
        id_order = None
        if P.id_order is not None:
            id_order = Relation(P.id_order.m[np.ix_(keep, keep)])
        labels = tuple(P.label(int(i)) for i in keep)
        return FinitePartialCategory(comp, new[P.d[keep]], new[P.r[keep]], id_order, labels)


def saturated_restrict(C: FinitePartialCategory, members) -> FinitePartialCategory:
    return SaturatedSubset(C, members).induced()


# --------------------------------------------------------------------------
# generators


def _pair_category(pairs: Sequence[tuple[int, int]], compose, names=None):
    index = {p: i for i, p in enumerate(pairs)}
    n = len(pairs)
    comp = np.full((n, n), UNDEFINED, dtype=np.intp)
    for i, (x, y) in enumerate(pairs):
        for j, (u, v) in enumerate(pairs):
            if y == u and compose(x, v):
                comp[i, j] = index[(x, v)]
    d = [index[(x, x)] for x, _ in pairs]
    r = [index[(y, y)] for _, y in pairs]
    name = (lambda v: str(v)) if names is None else (lambda v: names[v])
    labels = tuple(f"({name(x)},{name(y)})" for x, y in pairs)
    return FinitePartialCategory(comp, d, r, labels=labels)


def posetal_category(q: Relation, names: Sequence[str] | None = None) -> FinitePartialCategory:
    """Arrows are the pairs (x, y) with x q y, ordered lexicographically."""
    if not q.is_preorder():
        raise NotPreorder("posetal categories need a reflexive transitive relation")
    pairs = [(int(x), int(y)) for x, y in np.argwhere(q.m)]
    return _pair_category(pairs, lambda x, v: True, names)


def chain(n: int) -> Relation:
    return Relation(np.triu(np.ones((n, n), dtype=bool)))


def interval_partial_category(lo: int, hi: int, bound: int) -> FinitePartialCategory:
    """Pairs x <= y in lo..hi with y - x < bound; (x,y)(y,z) needs z - x < bound."""
    if lo > hi or bound < 1:
        raise ValueError("need lo <= hi and bound >= 1")
    pairs = [(x, y) for x in range(lo, hi + 1) for y in range(x, hi + 1) if y - x < bound]
    return _pair_category(pairs, lambda x, v: v - x < bound)


def path_category_truncation(
    n_vertices: int,
    edges: Sequence[tuple[int, int]],
    maxlen: int,
    names: Sequence[str] | None = None,
) -> FinitePartialCategory:
    """Paths of length at most ``maxlen`` in a digraph, identities included.

    Elements are sorted by (length, vertex sequence, edge sequence).
    """
    if maxlen < 1:
        raise ValueError("maxlen must be positive")
    for s, t in edges:
        if not (0 <= s < n_vertices and 0 <= t < n_vertices):
            raise ValueError(f"edge {(s, t)} leaves the vertex set")
    names = [str(v) for v in range(n_vertices)] if names is None else list(names)
    paths: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((v,), ()) for v in range(n_vertices)]
    frontier = [((s, t), (k,)) for k, (s, t) in enumerate(edges)]
    length = 1
    while frontier and length <= maxlen:
        paths.extend(frontier)
        frontier = [
            (verts + (t,), es + (k,))
            for verts, es in frontier
            for k, (s, t) in enumerate(edges)
            if s == verts[-1]
        ]
        length += 1
    paths.sort(key=lambda p: (len(p[1]), p[0], p[1]))
    index = {p[1] if p[1] else ("v", p[0][0]): i for i, p in enumerate(paths)}

    def key(verts, es):
        return es if es else ("v", verts[0])

    n = len(paths)
    comp = np.full((n, n), UNDEFINED, dtype=np.intp)
    for i, (v1, e1) in enumerate(paths):
        for j, (v2, e2) in enumerate(paths):
            if v1[-1] == v2[0] and len(e1) + len(e2) <= maxlen:
                comp[i, j] = index[key(v1 + v2[1:], e1 + e2)]
    d = [index[("v", v[0])] for v, _ in paths]
    r = [index[("v", v[-1])] for v, _ in paths]
    seen: dict[str, int] = {}
    labels = []
    for verts, _ in paths:
        base = ">".join(names[v] for v in verts)
        dup = seen.get(base, 0)
        labels.append(base if dup == 0 else f"{base}#{dup}")
        seen[base] = dup + 1
    return FinitePartialCategory(comp, d, r, labels=tuple(labels))
