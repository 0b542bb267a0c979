"""Passing between ample DR-semigroups and ample partial categories.

``derive_CS`` turns an ample DR-semigroup into an ordered partial category
on the same carrier; ``pseudoproduct`` goes back.  Both directions are
carrier preserving, so round trips compare tables directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import numpy as np

from .core import (
    DEFAULT_MAX_WITNESSES,
    CheckReport,
    FiniteBiunarySemigroup,
    Law,
    PreconditionError,
    Relation,
    TheoremViolation,
    Witness,
    check_ample,
    leq_l,
    leq_r,
    require_dr,
    run_laws,
)
from .pcat import UNDEFINED, FinitePartialCategory, check_partial_category


def cat_trace_product(S: FiniteBiunarySemigroup, require_ample: bool = True) -> FinitePartialCategory:
    """Keep ``xy`` exactly when R(x) = D(y), D(xy) = D(x) and R(xy) = R(y).

    With ``require_ample=False`` any DR-semigroup is accepted; the result need
    not satisfy PC3 then.
    """
    require_dr(S, "cat_trace_product")
    if require_ample:
        amp = check_ample(S)
        if not amp.holds:
            raise PreconditionError("cat_trace_product requires the ample conditions", amp)
    x = np.arange(S.n)[:, None]
    y = np.arange(S.n)[None, :]
    xy = S.mul
    keep = (S.r[x] == S.d[y]) & (S.d[xy] == S.d[x]) & (S.r[xy] == S.r[y])
    comp = np.where(keep, xy, UNDEFINED)
    return FinitePartialCategory(comp, S.d, S.r, Relation(S.natural), S.labels)


@dataclass(frozen=True, eq=False)
class AmplePartialCategory:
    """A partial category with an order on all of its elements."""

    pc: FinitePartialCategory
    order: Relation

    def __post_init__(self):
        if self.order.n != self.pc.n:
            raise ValueError("order has the wrong size")

    @property
    def n(self) -> int:
        return self.pc.n

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AmplePartialCategory)
            and np.array_equal(self.pc.comp, other.pc.comp)
            and np.array_equal(self.pc.d, other.pc.d)
            and np.array_equal(self.pc.r, other.pc.r)
            and self.order == other.order
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"AmplePartialCategory(n={self.n})"

    def label(self, i: int) -> str:
        return self.pc.label(i)

    # attributes read by the law tests
    @property
    def comp(self):
        return self.pc.comp

    @property
    def d(self):
        return self.pc.d

    @property
    def r(self):
        return self.pc.r

    @property
    def le(self) -> np.ndarray:
        return self.order.m

    def domain(self, kind: str) -> np.ndarray:
        return self.pc.domain(kind)

    @cached_property
    def maximal_pairs(self) -> np.ndarray:
        """``[x, y] -> (x', y')`` largest composable pair below (x, y), or -1."""
        return _maximal_pairs(self.pc, self.order.m)

    @cached_property
    def decomposition_counts(self) -> np.ndarray:
        """``[x, y, w]`` counts pairs x' <= x, y' <= y with x' o y' = w."""
        n = self.n
        le, comp = self.order.m, self.pc.comp
        out = np.zeros((n, n, n), dtype=np.int32)
        for x, y in np.argwhere(self.pc.defined):
            sub = comp[np.ix_(le[:, x], le[:, y])]
            out[x, y] = np.bincount(sub[sub >= 0], minlength=n)
        return out

    @cached_property
    def apc_report(self) -> CheckReport:
        return check_apc(self.pc, self.order)


def apc(pc: FinitePartialCategory, order: Relation) -> AmplePartialCategory:
    """Bundle ``pc`` with ``order``, copying the order onto its identities."""
    ident_order = order.restrict(pc.identities)
    pc = FinitePartialCategory(pc.comp, pc.d, pc.r, ident_order, pc.labels)
    return AmplePartialCategory(pc, order)


def _maximal_pairs(pc: FinitePartialCategory, le: np.ndarray) -> np.ndarray:
    # exhaustive scan over down-sets; maximality is checked against every
    # composable candidate before (x', y') is accepted
    n = pc.n
    out = np.full((n, n, 2), -1, dtype=np.intp)
    downs = [np.flatnonzero(le[:, x]) for x in range(n)]
    for x in range(n):
        dx = downs[x]
        for y in range(n):
            dy = downs[y]
            cand = pc.defined[np.ix_(dx, dy)]
            if not cand.any():
                continue
            A = dx[cand.any(axis=1)]
            B = dy[cand.any(axis=0)]
            top_a = [a for a in A if le[A, a].all()]
            top_b = [b for b in B if le[B, b].all()]
            if len(top_a) == 1 and len(top_b) == 1 and pc.defined[top_a[0], top_b[0]]:
                out[x, y] = (top_a[0], top_b[0])
    return out


def _apc3(C, s1, s2, t1, t2):
    c1 = C.comp[s1, t1]
    c2 = C.comp[s2, t2]
    both = (c1 != UNDEFINED) & (c2 != UNDEFINED)
    le = C.le[np.where(c1 < 0, 0, c1), np.where(c2 < 0, 0, c2)]
    return ~(C.le[s1, s2] & C.le[t1, t2] & both) | le


def _apc4(C, x, y):
    return ~C.le[x, y] | (C.le[C.d[x], C.d[y]] & C.le[C.r[x], C.r[y]])


def _apc5(C, x, y):
    return C.maximal_pairs[x, y, 0] >= 0


def _apc8(C, x, y, w):
    xy = C.comp[x, y]
    premise = (xy != UNDEFINED) & C.le[w, np.where(xy < 0, 0, xy)]
    return ~premise | (C.decomposition_counts[x, y, w] > 0)


APC_LAWS = (
    Law("APC2-reflexive", ("all",), lambda C, x: C.le[x, x]),
    Law("APC2-antisymmetric", ("all", "all"), lambda C, x, y: ~(C.le[x, y] & C.le[y, x]) | (x == y)),
    Law(
        "APC2-transitive",
        ("all", "all", "all"),
        lambda C, x, y, z: ~(C.le[x, y] & C.le[y, z]) | C.le[x, z],
    ),
    Law("APC3", ("all", "all", "all", "all"), _apc3),
    Law("APC4", ("all", "all"), _apc4),
    Law("APC6", ("all", "all"), lambda C, x, y: ~(C.le[x, y] & (C.d[x] == C.d[y])) | (x == y)),
    Law("APC7", ("all", "all"), lambda C, x, y: ~(C.le[x, y] & (C.r[x] == C.r[y])) | (x == y)),
    Law("APC5", ("all", "all"), _apc5),
    Law("APC8", ("all", "all", "all"), _apc8),
)


def _order_ideal(C, x, e):
    return ~C.le[x, e] | (C.d[x] == x)


def _comparable_d(C, x, y, z):
    return ~(C.le[x, z] & C.le[y, z] & C.le[C.d[x], C.d[y]]) | C.le[x, y]


def _comparable_r(C, x, y, z):
    return ~(C.le[x, z] & C.le[y, z] & C.le[C.r[x], C.r[y]]) | C.le[x, y]


def _unique_below(C, x, y, z):
    same = (C.d[x] == C.d[y]) | (C.r[x] == C.r[y])
    return ~(C.le[x, z] & C.le[y, z] & same) | (x == y)


def _apc8_unique(C, x, y, w):
    return C.decomposition_counts[x, y, w] <= 1


def _meet(C, e, f):
    # identities below both e and f must have a largest member
    out = np.empty(np.broadcast(e, f).shape, dtype=bool)
    ident = (C.d == np.arange(C.n)).reshape((C.n,) + (1,) * out.ndim)
    lower = np.broadcast_to(C.le[:, e] & C.le[:, f] & ident, (C.n,) + out.shape)
    for idx in np.ndindex(out.shape):
        cand = np.flatnonzero(lower[(slice(None),) + idx])
        out[idx] = any(C.le[cand, c].all() for c in cand)
    return out


APC_INTERNAL = (
    Law("order-ideal", ("all", "ident"), _order_ideal),
    Law("comparable-D", ("all", "all", "all"), _comparable_d),
    Law("comparable-R", ("all", "all", "all"), _comparable_r),
    Law("unique-below", ("all", "all", "all"), _unique_below),
    Law("APC8-unique", ("all", "all", "all"), _apc8_unique),
    Law("identity-meet", ("ident", "ident"), _meet),
)

APC_LAW_TABLE: dict[str, Law] = {law.name: law for law in APC_LAWS + APC_INTERNAL}


def check_apc(
    pc: FinitePartialCategory, order: Relation, max_witnesses=DEFAULT_MAX_WITNESSES
) -> CheckReport:
    """APC1-APC8, plus theorem-backed consequences reported as ``internal``.

    APC1 failures appear as witnesses of the partial-category laws.
    """
    base = check_partial_category(pc, max_witnesses)
    C = AmplePartialCategory(pc, order)
    rest = run_laws("apc", C, APC_LAWS, max(0, max_witnesses - len(base.witnesses)), APC_INTERNAL)
    holds = base.holds and rest.holds
    internal = rest.internal if holds else ()
    return CheckReport(
        "apc",
        holds,
        base.witnesses + rest.witnesses,
        base.failures + rest.failures,
        base.checked + rest.checked,
        internal=internal,
    )


def require_apc(C: AmplePartialCategory, what: str) -> None:
    rep = C.apc_report
    if not rep.holds:
        raise PreconditionError(f"{what} requires an ample partial category", rep)
    if rep.internal:
        raise TheoremViolation(f"APC consequences failed: {rep.internal}")


def derive_CS(S: FiniteBiunarySemigroup) -> AmplePartialCategory:
    """The (cat,trace)-product ordered by the standard order."""
    pc = cat_trace_product(S)
    order = leq_r(S)
    if order != leq_l(S):
        raise TheoremViolation("left and right orders differ on an ample semigroup")
    return apc(pc, order)


def maximal_pair(C: AmplePartialCategory, x: int, y: int) -> tuple[int, int] | None:
    a, b = C.maximal_pairs[x, y]
    return None if a < 0 else (int(a), int(b))


def matching_term(C: AmplePartialCategory, x: int, y: int) -> int:
    require_apc(C, "matching_term")
    a, _ = maximal_pair(C, x, y)
    return int(C.r[a])


def _is_identity(C: AmplePartialCategory, e: int) -> bool:
    return C.d[e] == e


def restriction(C: AmplePartialCategory, y: int, e: int) -> int | None:
    """The element below ``y`` with domain ``e``, if there is one."""
    if not _is_identity(C, e) or not C.le[e, C.d[y]]:
        raise ValueError(f"{e} is not an identity below D({y})")
    below = [int(x) for x in np.flatnonzero(C.le[:, y]) if C.d[x] == e]
    if len(below) > 1:
        raise TheoremViolation(f"restriction of {y} by {e} is not unique: {below}")
    return below[0] if below else None


def corestriction(C: AmplePartialCategory, y: int, e: int) -> int | None:
    if not _is_identity(C, e) or not C.le[e, C.r[y]]:
        raise ValueError(f"{e} is not an identity below R({y})")
    below = [int(x) for x in np.flatnonzero(C.le[:, y]) if C.r[x] == e]
    if len(below) > 1:
        raise TheoremViolation(f"corestriction of {y} by {e} is not unique: {below}")
    return below[0] if below else None


def pseudoproduct(C: AmplePartialCategory) -> FiniteBiunarySemigroup:
    """Compose the largest composable pair below each (x, y)."""
    require_apc(C, "pseudoproduct")
    mp = C.maximal_pairs
    mul = C.comp[mp[..., 0], mp[..., 1]]
    return FiniteBiunarySemigroup(mul, C.d, C.r, C.pc.labels)


def _diff(name, pairs) -> CheckReport:
    pairs = list(pairs)
    return CheckReport(name, not pairs, tuple(pairs[:DEFAULT_MAX_WITNESSES]), len(pairs))


def _table_diff(label, a, b):
    return [Witness(label, tuple(int(i) for i in idx)) for idx in np.argwhere(a != b)]


def roundtrip_S(S: FiniteBiunarySemigroup) -> CheckReport:
    """S(C(S)) against S: multiplication, D and R tables."""
    back = pseudoproduct(derive_CS(S))
    diffs = (
        _table_diff("mul", S.mul, back.mul)
        + _table_diff("D", S.d, back.d)
        + _table_diff("R", S.r, back.r)
    )
    rep = _diff("roundtrip-S", diffs)
    return CheckReport(rep.name, rep.holds, rep.witnesses, rep.failures, S.n * S.n + 2 * S.n)


def roundtrip_C(C: AmplePartialCategory) -> CheckReport:
    """C(S(C)) against C: composition, D, R and the order."""
    back = derive_CS(pseudoproduct(C))
    diffs = (
        _table_diff("comp", C.comp, back.comp)
        + _table_diff("D", C.d, back.d)
        + _table_diff("R", C.r, back.r)
        + _table_diff("order", C.le, back.le)
    )
    rep = _diff("roundtrip-C", diffs)
    return CheckReport(rep.name, rep.holds, rep.witnesses, rep.failures, 2 * C.n * C.n + 2 * C.n)


# --------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True, eq=False)
class BiunaryMap:
    """A total map between two structures, given by its image list.

    ``source`` and ``target`` are either semigroups exposing ``op``, ``dom``
    and ``ran`` (finite or lazy power-set) or ample partial categories.
    """

    source: object
    target: object
    mapping: tuple

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(v) for v in self.mapping))
        if len(self.mapping) != self.source.n:
            raise ValueError("mapping must give an image for every source element")

    def __call__(self, x: int) -> int:
        return self.mapping[x]


def is_dr_morphism(f: BiunaryMap, max_witnesses=DEFAULT_MAX_WITNESSES) -> CheckReport:
    S, T, m = f.source, f.target, f.mapping
    if isinstance(T, FiniteBiunarySemigroup):
        return _dr_morphism_table(S, T, np.array(m, dtype=np.intp), max_witnesses)
    bad: list[Witness] = []
    n = S.n
    for x in range(n):
        for y in range(n):
            if m[S.op(x, y)] != T.op(m[x], m[y]):
                bad.append(Witness("hom", (x, y)))
        if m[S.dom(x)] != T.dom(m[x]):
            bad.append(Witness("D", (x,)))
        if m[S.ran(x)] != T.ran(m[x]):
            bad.append(Witness("R", (x,)))
    return CheckReport(
        "dr-morphism", not bad, tuple(bad[:max_witnesses]), len(bad), n * n + 2 * n
    )


def _dr_morphism_table(S, T, m, max_witnesses):
    if (m < 0).any() or (m >= T.n).any():
        raise ValueError("mapping leaves the target")
    bad = [Witness("hom", (int(x), int(y))) for x, y in np.argwhere(m[S.mul] != T.mul[np.ix_(m, m)])]
    bad += [Witness("D", (int(x),)) for x in np.flatnonzero(m[S.d] != T.d[m])]
    bad += [Witness("R", (int(x),)) for x in np.flatnonzero(m[S.r] != T.r[m])]
    return CheckReport(
        "dr-morphism", not bad, tuple(bad[:max_witnesses]), len(bad), S.n * S.n + 2 * S.n
    )


def is_ample_functor(g: BiunaryMap, max_witnesses=DEFAULT_MAX_WITNESSES) -> CheckReport:
    """Composition, D/R, order and matching-term preservation.

    When these hold, preservation of the largest composable pairs is checked
    as an internal consequence.
    """
    A, B = g.source, g.target
    for side in (A, B):
        require_apc(side, "is_ample_functor")
    m = np.array(g.mapping, dtype=np.intp)
    s = np.arange(A.n)[:, None]
    t = np.arange(A.n)[None, :]
    bad: list[Witness] = []
    defined = A.pc.defined
    fc = B.comp[m[s], m[t]]
    keep = np.where(defined, A.comp, 0)
    comp_bad = defined & ((fc == UNDEFINED) | (fc != m[keep]))
    bad += [Witness("composition", (int(a), int(b))) for a, b in np.argwhere(comp_bad)]
    bad += [Witness("D", (int(x),)) for x in np.flatnonzero(m[A.d] != B.d[m])]
    bad += [Witness("R", (int(x),)) for x in np.flatnonzero(m[A.r] != B.r[m])]
    order_bad = A.le & ~B.le[m[s], m[t]]
    bad += [Witness("order", (int(a), int(b))) for a, b in np.argwhere(order_bad)]
    mpA, mpB = A.maximal_pairs, B.maximal_pairs
    mtA = A.r[mpA[..., 0]]
    mtB = B.r[mpB[m[s], m[t], 0]]
    bad += [Witness("matching-term", (int(a), int(b))) for a, b in np.argwhere(m[mtA] != mtB)]
    internal: tuple[Witness, ...] = ()
    if not bad:
        img = m[mpA]
        target = mpB[m[s], m[t]]
        wrong = (img != target).any(axis=-1)
        internal = tuple(
            Witness("maximal-pair", (int(a), int(b))) for a, b in np.argwhere(wrong)
        )[:max_witnesses]
    size = A.n
    return CheckReport(
        "ample-functor",
        not bad,
        tuple(bad[:max_witnesses]),
        len(bad),
        3 * size * size + 2 * size,
        internal=internal,
    )


def functor_of(f: BiunaryMap) -> BiunaryMap:
    """View a DR-morphism between ample semigroups as a map C(S) -> C(T)."""
    return BiunaryMap(derive_CS(f.source), derive_CS(f.target), f.mapping)


def morphism_of(g: BiunaryMap) -> BiunaryMap:
    """View an ample functor as a map S(C1) -> S(C2)."""
    return BiunaryMap(pseudoproduct(g.source), pseudoproduct(g.target), g.mapping)


def split_product(S: FiniteBiunarySemigroup, x: int, y: int) -> tuple[int, int]:
    """The factors D(xy)x and yR(xy) of xy."""
    xy = S.mul[x, y]
    return int(S.mul[S.d[xy], x]), int(S.mul[y, S.r[xy]])


def identity_map(X) -> BiunaryMap:
    return BiunaryMap(X, X, tuple(range(X.n)))
