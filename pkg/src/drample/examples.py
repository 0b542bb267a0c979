"""Concrete DR-semigroups and the enumerated corpus.

Generators here produce whole structures (closure-operator power sets,
strongly order-preserving partial functions, the interval isometry scenario)
and :func:`enumerate_dr_corpus` lists every DR-semigroup of small order up to
isomorphism.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .core import (
    FiniteBiunarySemigroup,
    NoSmallestProjection,
    Relation,
    check_ample,
    derive_dr_from_e,
)
from .pcat import FinitePartialCategory, chain, interval_partial_category, posetal_category
from .powerset import (
    CapExceeded,
    PowerSetSemigroup,
    SubsetElement,
    format_subset,
    generated_subsemigroup,
    partial_isometry_semigroup,
)


class NotAClosureOperator(ValueError):
    def __init__(self, law: str, witness: tuple[int, ...]):
        super().__init__(f"{law} fails at {witness}")
        self.law = law
        self.witness = witness


# --------------------------------------------------------------------------
# closure operators


def closure_powerset(k: int, cl: Sequence[int]) -> FiniteBiunarySemigroup:
    """Subsets of a k-set (as bitmasks) under intersection, with D = R = cl."""
    size = 1 << k
    cl = [int(c) for c in cl]
    if len(cl) != size:
        raise ValueError(f"closure table needs {size} entries")
    for T in range(size):
        if cl[T] & T != T:
            raise NotAClosureOperator("extensive", (T,))
        if cl[cl[T]] != cl[T]:
            raise NotAClosureOperator("idempotent", (T,))
    for T in range(size):
        for U in range(size):
            if T & U == T and cl[T] & cl[U] != cl[T]:
                raise NotAClosureOperator("monotone", (T, U))
    masks = np.arange(size)
    mul = masks[:, None] & masks[None, :]
    labels = tuple(format_subset(T) for T in range(size))
    return FiniteBiunarySemigroup(mul, cl, cl, labels)


def downset_closure(q: Relation) -> list[int]:
    """T -> {y | y <= x for some x in T}, for every subset T."""
    k = q.n
    down = [sum(1 << y for y in range(k) if q.m[y, x]) for x in range(k)]
    out = []
    for T in range(1 << k):
        c = 0
        for x in range(k):
            if T >> x & 1:
                c |= down[x]
        out.append(c)
    return out


def identity_closure(k: int) -> list[int]:
    return list(range(1 << k))


def top_closure(k: int) -> list[int]:
    """Empty set stays empty; everything else closes to the whole set."""
    full = (1 << k) - 1
    return [0] + [full] * (full)


# --------------------------------------------------------------------------
# quasiordered sets and strongly order-preserving partial functions


@dataclass(frozen=True)
class QuasiOrderedSet:
    q: Relation

    def __post_init__(self):
        if not self.q.is_preorder():
            raise ValueError("a quasiorder must be reflexive and transitive")

    @property
    def n(self) -> int:
        return self.q.n

    def down(self, members) -> set[int]:
        return {y for y in range(self.n) for x in members if self.q.m[y, x]}


def all_quasiorders(n: int) -> Iterator[QuasiOrderedSet]:
    off = [(a, b) for a in range(n) for b in range(n) if a != b]
    for choice in itertools.product((False, True), repeat=len(off)):
        m = np.eye(n, dtype=bool)
        for (a, b), on in zip(off, choice):
            m[a, b] = on
        rel = Relation(m)
        if rel.is_transitive():
            yield QuasiOrderedSet(rel)


# f[x] is the image of x, or -1 off the domain
PartialFunction = tuple


def is_strongly_order_preserving(X: QuasiOrderedSet, f: PartialFunction) -> bool:
    dom = [x for x in range(X.n) if f[x] >= 0]
    q = X.q.m
    return all(q[x, y] == q[f[x], f[y]] for x in dom for y in dom)


def compose(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    """Apply f, then g."""
    return tuple(g[v] if v >= 0 else -1 for v in f)


def restricted_identity(n: int, members) -> PartialFunction:
    return tuple(x if x in members else -1 for x in range(n))


def format_function(f: PartialFunction) -> str:
    return "{" + ",".join(f"{x}:{v}" for x, v in enumerate(f) if v >= 0) + "}"


def pso_elements(X: QuasiOrderedSet, cap: int = 4) -> list[PartialFunction]:
    if X.n > cap:
        raise CapExceeded(f"|X| = {X.n} exceeds the cap of {cap}")
    return [
        f
        for f in itertools.product(range(-1, X.n), repeat=X.n)
        if is_strongly_order_preserving(X, f)
    ]


def pso_semigroup(X: QuasiOrderedSet, cap: int = 4) -> FiniteBiunarySemigroup:
    """Strongly order-preserving partial functions under composition.

    D(f) is the identity on the down-set of dom(f), R(f) on that of im(f).
    """
    elems = pso_elements(X, cap)
    index = {f: i for i, f in enumerate(elems)}
    k = len(elems)
    mul = np.empty((k, k), dtype=np.intp)
    for i, f in enumerate(elems):
        for j, g in enumerate(elems):
            mul[i, j] = index[compose(f, g)]
    d, r = [], []
    for f in elems:
        dom = [x for x in range(X.n) if f[x] >= 0]
        im = [v for v in f if v >= 0]
        d.append(index[restricted_identity(X.n, X.down(dom))])
        r.append(index[restricted_identity(X.n, X.down(im))])
    return FiniteBiunarySemigroup(mul, d, r, tuple(format_function(f) for f in elems))


def pso_identity_copy(X: QuasiOrderedSet, cap: int = 4) -> list[int]:
    """Index in ``pso_semigroup(X)`` of the identity on each subset (by bitmask)."""
    index = {f: i for i, f in enumerate(pso_elements(X, cap))}
    return [
        index[restricted_identity(X.n, {x for x in range(X.n) if T >> x & 1})]
        for T in range(1 << X.n)
    ]


def symmetric_inverse_monoid(n: int) -> FiniteBiunarySemigroup:
    """All partial injections on n points; injective maps are exactly the
    strongly order-preserving ones for the discrete order."""
    return pso_semigroup(QuasiOrderedSet(Relation.equality(n)), cap=max(n, 4))


# --------------------------------------------------------------------------
# the interval isometry scenario


@dataclass(frozen=True)
class IsometryScenario:
    parent: FinitePartialCategory
    f: SubsetElement
    g: SubsetElement
    fg: SubsetElement
    D_fg: SubsetElement
    D_fDg: SubsetElement

    def pairs(self, A: SubsetElement) -> list[tuple[int, int]]:
        """Members of A written as integer pairs (x, y)."""
        out = []
        for i in A.members:
            x, y = self.parent.label(i).strip("()").split(",")
            out.append((int(x), int(y)))
        return out

    def induced(self) -> FiniteBiunarySemigroup:
        """The DR-subsemigroup generated by f and g; f is 0 and g is 1."""
        P = self.f.parent
        S, _ = generated_subsemigroup(P, [self.f.mask, self.g.mask])
        return S


def interval_isometry_instance() -> IsometryScenario:
    """f = {(1,3),(3,7)} and g = {(3,5),(7,9)} inside P_5 over 0..10."""
    C = interval_partial_category(0, 10, 5)
    P = PowerSetSemigroup(C)
    pos = {C.label(i): i for i in range(C.n)}

    def subset(*pairs):
        return SubsetElement.of(P, [pos[f"({x},{y})"] for x, y in pairs])

    f = subset((1, 3), (3, 7))
    g = subset((3, 5), (7, 9))
    fg = f * g
    D = lambda A: SubsetElement(P, P.dom(A.mask))  # noqa: E731
    return IsometryScenario(C, f, g, fg, D(fg), D(f * D(g)))


# --------------------------------------------------------------------------
# enumeration


def brute_force_semigroups(n: int) -> np.ndarray:
    """All associative n x n tables, by scanning every table."""
    if n > 3:
        raise CapExceeded("exhaustive table scan is limited to order 3")
    T = np.array(list(itertools.product(range(n), repeat=n * n)), dtype=np.intp)
    T = T.reshape(-1, n, n)
    t = np.arange(len(T))[:, None, None, None]
    x = np.arange(n)[None, :, None, None]
    y = np.arange(n)[None, None, :, None]
    z = np.arange(n)[None, None, None, :]
    lhs = T[t, T[t, x, y], z]
    rhs = T[t, x, T[t, y, z]]
    return T[(lhs == rhs).reshape(len(T), -1).all(axis=1)]


def backtrack_semigroups(n: int) -> np.ndarray:
    """All associative n x n tables by backtracking.

    The diagonal (which elements are idempotent, and what squares are) is
    fixed first; every partial assignment is pruned on associativity over
    the triples whose lookups are already defined.
    """
    cells = [(i, i) for i in range(n)] + [
        (i, j) for i in range(n) for j in range(n) if i != j
    ]
    t = [[-1] * n for _ in range(n)]
    found: list[list[int]] = []
    rng = range(n)

    def ok() -> bool:
        for x in rng:
            for y in rng:
                xy = t[x][y]
                if xy < 0:
                    continue
                for z in rng:
                    yz = t[y][z]
                    if yz < 0:
                        continue
                    lhs, rhs = t[xy][z], t[x][yz]
                    if lhs >= 0 and rhs >= 0 and lhs != rhs:
                        return False
        return True

    def fill(pos: int):
        if pos == len(cells):
            found.append([v for row in t for v in row])
            return
        i, j = cells[pos]
        for v in rng:
            t[i][j] = v
            if ok():
                fill(pos + 1)
        t[i][j] = -1

    fill(0)
    return np.array(found, dtype=np.intp).reshape(-1, n, n)


def _perms(n: int) -> tuple[np.ndarray, np.ndarray]:
    P = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    return P, np.argsort(P, axis=1)


def canonical_key(mul: np.ndarray, d: np.ndarray | None = None, r: np.ndarray | None = None):
    """Lexicographically least (mul, D, R) over relabellings, and the relabelling."""
    n = mul.shape[0]
    P, INV = _perms(n)
    k = np.arange(len(P))[:, None, None]
    M = P[k, mul[INV[:, :, None], INV[:, None, :]]].reshape(len(P), -1)
    parts = [M]
    for u in (d, r):
        if u is not None:
            parts.append(P[np.arange(len(P))[:, None], u[INV]])
    flat = np.concatenate(parts, axis=1)
    best = min(range(len(P)), key=lambda i: tuple(flat[i]))
    return tuple(int(v) for v in flat[best]), P[best]


def relabel(S: FiniteBiunarySemigroup, p: np.ndarray) -> FiniteBiunarySemigroup:
    """Element i of S becomes element p[i]."""
    inv = np.argsort(p)
    mul = p[S.mul[np.ix_(inv, inv)]]
    labels = None if S.labels is None else tuple(S.labels[i] for i in inv)
    return FiniteBiunarySemigroup(mul, p[S.d[inv]], p[S.r[inv]], labels)


def canonical_form(S: FiniteBiunarySemigroup) -> FiniteBiunarySemigroup:
    _, p = canonical_key(S.mul, S.d, S.r)
    return relabel(S, p)


def semigroup_representatives(n: int, mode: str = "auto") -> list[np.ndarray]:
    """One table per isomorphism class of semigroups of order n."""
    if mode == "auto":
        mode = "exhaustive" if n <= 3 else "constrained"
    if mode == "exhaustive":
        tables = brute_force_semigroups(n)
    elif mode == "constrained":
        if n > 4:
            raise CapExceeded("constrained enumeration is limited to order 4")
        tables = backtrack_semigroups(n)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    reps: dict[tuple, np.ndarray] = {}
    for T in tables:
        key, p = canonical_key(T)
        if key not in reps:
            reps[key] = np.array(key, dtype=np.intp).reshape(n, n)
    return [reps[k] for k in sorted(reps)]


def dr_structures_on(mul: np.ndarray) -> list[FiniteBiunarySemigroup]:
    """Every DR structure on ``mul`` arising from a set of idempotents."""
    n = mul.shape[0]
    idem = [e for e in range(n) if mul[e, e] == e]
    out = []
    for size in range(1, len(idem) + 1):
        for E in itertools.combinations(idem, size):
            try:
                out.append(derive_dr_from_e(mul, E))
            except NoSmallestProjection:
                continue
    return out


def dr_corpus_of_order(n: int, mode: str = "auto") -> list[FiniteBiunarySemigroup]:
    classes: dict[tuple, FiniteBiunarySemigroup] = {}
    for mul in semigroup_representatives(n, mode):
        for S in dr_structures_on(mul):
            key, p = canonical_key(S.mul, S.d, S.r)
            if key not in classes:
                classes[key] = relabel(S, p)
    return [classes[k] for k in sorted(classes)]


def enumerate_dr_corpus(max_order: int, cap_order: int = 4) -> list[FiniteBiunarySemigroup]:
    """All DR-semigroups of order 1..max_order up to isomorphism.

    Orders up to 3 scan every table; order 4 uses the backtracking search.
    The result is sorted by order, then canonical form.
    """
    if max_order > cap_order or max_order > 4:
        raise CapExceeded(f"corpus order {max_order} exceeds the cap")
    out: list[FiniteBiunarySemigroup] = []
    for n in range(1, max_order + 1):
        out.extend(dr_corpus_of_order(n))
    return out


# --------------------------------------------------------------------------
# curated instances beyond the enumerated orders


def curated_instances() -> list[tuple[str, FiniteBiunarySemigroup]]:
    """Named ample and non-ample DR-semigroups from the generators."""
    out: list[tuple[str, FiniteBiunarySemigroup]] = []
    for k in (1, 2):
        out.append((f"closure-identity-{k}", closure_powerset(k, identity_closure(k))))
        out.append((f"closure-top-{k}", closure_powerset(k, top_closure(k))))
    out.append(("closure-chain-2", closure_powerset(2, downset_closure(Relation(np.array([[1, 0], [1, 1]]))))))
    for k in (1, 2):
        for i, X in enumerate(all_quasiorders(k)):
            out.append((f"pso-{k}-{i}", pso_semigroup(X)))
    out.append(("inverse-monoid-2", symmetric_inverse_monoid(2)))
    for name, C in (
        ("pi-chain-2", posetal_category(chain(2))),
        ("pi-interval-0-3-2", interval_partial_category(0, 3, 2)),
    ):
        out.append((name, partial_isometry_semigroup(C)[0]))
    return out


def ample_instances(max_order: int) -> list[FiniteBiunarySemigroup]:
    """Ample members of the enumerated corpus (orders <= 4) plus curated ones."""
    pool = enumerate_dr_corpus(min(max_order, 4))
    pool += [S for _, S in curated_instances() if S.n <= max_order]
    return [S for S in pool if check_ample(S).holds]


# --------------------------------------------------------------------------
# corpus on disk


def corpus_files(max_order: int, cap_order: int = 4) -> dict[str, str]:
    """Relative path -> file text for every corpus member."""
    from .formats import dumps

    out = {}
    for S in enumerate_dr_corpus(max_order, cap_order):
        text = dumps(S)
        digest = hashlib.sha256(text.encode()).hexdigest()[:16]
        out[f"order{S.n}/{digest}.drs"] = text
    return out


def write_corpus(directory: Path | str, max_order: int, cap_order: int = 4) -> list[Path]:
    root = Path(directory)
    written = []
    for rel, text in sorted(corpus_files(max_order, cap_order).items()):
        path = root / "corpus" / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        written.append(path)
    return written
