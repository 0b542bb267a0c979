"""Finite biunary semigroups, the DR axioms and the conditions built on them.

Elements are dense indices ``0..n-1``.  Every condition is expressed as a set
of :class:`Law` objects evaluated over broadcast index grids, so the same
predicate serves both the exhaustive scan and the re-evaluation of a stored
witness (see :func:`law_holds`).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

DEFAULT_MAX_WITNESSES = 8

# upper bound on grid cells evaluated per numpy call
_CHUNK = 1 << 22


class PreconditionError(Exception):
    """An operation was applied to a structure that fails its precondition."""

    def __init__(self, message: str, report: "CheckReport | None" = None):
        super().__init__(message)
        self.report = report


class TheoremViolation(AssertionError):
    """A consequence that must hold by theorem failed; this is a bug."""


class NoSmallestProjection(ValueError):
    def __init__(self, element: int, direction: str):
        super().__init__(
            f"no smallest e in E with "
            f"{'e*s = s' if direction == 'D' else 's*e = s'} for s={element}"
        )
        self.element = element
        self.direction = direction


class Witness(NamedTuple):
    law: str
    elements: tuple[int, ...]


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a condition check.

    ``witnesses`` keeps at most a bounded number of failures, ``failures``
    counts all of them.  A report whose precondition failed has
    ``holds=False`` and carries the blocking report in ``precondition``.
    ``internal`` lists failures of theorem-backed consequences, which can
    only appear through an implementation error.
    """

    name: str
    holds: bool
    witnesses: tuple[Witness, ...] = ()
    failures: int = 0
    checked: int = 0
    precondition: "CheckReport | None" = None
    internal: tuple[Witness, ...] = ()

    def __post_init__(self):
        if self.holds and self.witnesses:
            raise ValueError("a holding report cannot carry witnesses")

    def __bool__(self) -> bool:
        return self.holds

    @property
    def status(self) -> str:
        if self.precondition is not None:
            return "precondition-failed"
        return "holds" if self.holds else "fails"

    @property
    def consistent(self) -> bool:
        return not self.internal

    @classmethod
    def blocked(cls, name: str, cause: "CheckReport") -> "CheckReport":
        return cls(name, False, precondition=cause)


@dataclass(frozen=True)
class Law:
    """A universally quantified law.

    ``domains`` names the index set each variable ranges over (``"all"`` for
    every element, ``"proj"`` for projections, ``"ident"`` for identities of a
    partial category).  ``test`` maps broadcast index arrays to a boolean
    array that is true where the law holds.
    """

    name: str
    domains: tuple[str, ...]
    test: Callable[..., np.ndarray]


def _scan_law(target, law: Law, room: int):
    doms = [np.asarray(target.domain(k), dtype=np.intp) for k in law.domains]
    shape = tuple(len(d) for d in doms)
    total = prod(shape)
    if total == 0:
        return 0, 0, []
    rest = prod(shape[1:])
    step = max(1, _CHUNK // max(rest, 1))
    failures = 0
    found: list[Witness] = []
    for start in range(0, shape[0], step):
        head = doms[0][start:start + step]
        grids = np.ix_(head, *doms[1:])
        ok = np.broadcast_to(law.test(target, *grids), (len(head),) + shape[1:])
        bad = ~ok
        count = int(np.count_nonzero(bad))
        if count and len(found) < room:
            for idx in np.argwhere(bad)[: room - len(found)]:
                elems = (int(head[idx[0]]),) + tuple(
                    int(doms[k][idx[k]]) for k in range(1, len(doms))
                )
                found.append(Witness(law.name, elems))
        failures += count
    return failures, total, found


def run_laws(
    name: str,
    target,
    laws: Sequence[Law],
    max_witnesses: int = DEFAULT_MAX_WITNESSES,
    internal: Sequence[Law] = (),
) -> CheckReport:
    """Scan ``laws`` exhaustively; ``internal`` laws run only if all hold."""
    failures = checked = 0
    witnesses: list[Witness] = []
    for law in laws:
        f, c, w = _scan_law(target, law, max_witnesses - len(witnesses))
        failures += f
        checked += c
        witnesses.extend(w)
    bugs: list[Witness] = []
    if failures == 0:
        for law in internal:
            _, c, w = _scan_law(target, law, max_witnesses - len(bugs))
            checked += c
            bugs.extend(w)
    return CheckReport(
        name, failures == 0, tuple(witnesses), failures, checked, internal=tuple(bugs)
    )


def law_holds(target, witness: Witness, laws: dict[str, Law]) -> bool:
    """Re-evaluate the law named by ``witness`` at its element tuple."""
    law = laws[witness.law]
    args = [np.asarray(v, dtype=np.intp) for v in witness.elements]
    return bool(law.test(target, *args))


# --------------------------------------------------------------------------
# relations


@dataclass(frozen=True, eq=False)
class Relation:
    """Boolean ``n x n`` relation matrix; ``m[a, b]`` means ``a <= b``."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("relation matrix must be square")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @classmethod
    def equality(cls, n: int, on: Iterable[int] | None = None) -> "Relation":
        m = np.zeros((n, n), dtype=bool)
        idx = np.arange(n) if on is None else np.fromiter(on, dtype=np.intp)
        m[idx, idx] = True
        return cls(m)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Relation":
        m = np.zeros((n, n), dtype=bool)
        for a, b in pairs:
            m[a, b] = True
        return cls(m)

    def __call__(self, a: int, b: int) -> bool:
        return bool(self.m[a, b])

    def __eq__(self, other) -> bool:
        return isinstance(other, Relation) and np.array_equal(self.m, other.m)

    __hash__ = None

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in np.argwhere(self.m)]

    def support(self) -> np.ndarray:
        """Indices that occur in some related pair."""
        return np.flatnonzero(self.m.any(axis=0) | self.m.any(axis=1))

    def restrict(self, on: Iterable[int]) -> "Relation":
        keep = np.zeros(self.n, dtype=bool)
        keep[np.fromiter(on, dtype=np.intp)] = True
        return Relation(self.m & keep[:, None] & keep[None, :])

    def is_reflexive(self, on: Iterable[int] | None = None) -> bool:
        idx = np.arange(self.n) if on is None else np.fromiter(on, dtype=np.intp)
        return bool(self.m[idx, idx].all())

    def is_antisymmetric(self) -> bool:
        both = self.m & self.m.T
        np.fill_diagonal(both, False)
        return not both.any()

    def is_transitive(self) -> bool:
        f = self.m.astype(np.float32)
        return not ((f @ f > 0) & ~self.m).any()

    def is_preorder(self, on: Iterable[int] | None = None) -> bool:
        return self.is_reflexive(on) and self.is_transitive()

    def is_partial_order(self, on: Iterable[int] | None = None) -> bool:
        return self.is_preorder(on) and self.is_antisymmetric()


# --------------------------------------------------------------------------
# biunary semigroups


def _index_array(values, n: int, what: str) -> np.ndarray:
    a = np.array(values, dtype=np.intp)
    if a.size and (a.min() < 0 or a.max() >= n):
        raise ValueError(f"{what} has entries outside 0..{n - 1}")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FiniteBiunarySemigroup:
    """A total binary table together with two unary maps ``d`` and ``r``.

    Only the tables take part in equality; ``labels`` are display metadata.
    """

    mul: np.ndarray
    d: np.ndarray
    r: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        mul = np.array(self.mul, dtype=np.intp)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] < 1:
            raise ValueError("mul must be a non-empty square table")
        n = mul.shape[0]
        object.__setattr__(self, "mul", _index_array(mul, n, "mul"))
        d = _index_array(self.d, n, "D")
        r = _index_array(self.r, n, "R")
        if d.shape != (n,) or r.shape != (n,):
            raise ValueError("D and R must list one image per element")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "r", r)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n:
                raise ValueError("labels must name every element")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.mul.shape[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteBiunarySemigroup)
            and np.array_equal(self.mul, other.mul)
            and np.array_equal(self.d, other.d)
            and np.array_equal(self.r, other.r)
        )

    def __hash__(self) -> int:
        return hash((self.mul.tobytes(), self.d.tobytes(), self.r.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteBiunarySemigroup(n={self.n})"

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    # protocol shared with the lazy power-set view
    def op(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def dom(self, a: int) -> int:
        return int(self.d[a])

    def ran(self, a: int) -> int:
        return int(self.r[a])

    def domain(self, kind: str) -> np.ndarray:
        if kind == "all":
            return np.arange(self.n)
        if kind == "proj":
            return self.projection_indices
        raise KeyError(kind)

    @cached_property
    def projection_indices(self) -> np.ndarray:
        return np.unique(self.d)

    @cached_property
    def natural(self) -> np.ndarray:
        return natural_order(self).m

    @cached_property
    def associativity_report(self) -> CheckReport:
        return check_associativity(self)

    @cached_property
    def dr_report(self) -> CheckReport:
        return check_dr_axioms(self)

    @property
    def is_dr(self) -> bool:
        return self.dr_report.holds


ASSOCIATIVITY = Law(
    "associativity",
    ("all", "all", "all"),
    lambda S, x, y, z: S.mul[S.mul[x, y], z] == S.mul[x, S.mul[y, z]],
)


def _dr4(S, x, y):
    dxy = S.d[S.mul[x, y]]
    dx = S.d[x]
    return (S.mul[dx, dxy] == dxy) & (S.mul[dxy, dx] == dxy)


def _dr5(S, x, y):
    rxy = S.r[S.mul[x, y]]
    ry = S.r[y]
    return (S.mul[ry, rxy] == rxy) & (S.mul[rxy, ry] == rxy)


DR_LAWS = (
    Law("DR1", ("all",), lambda S, x: S.mul[S.d[x], x] == x),
    Law("DR2", ("all",), lambda S, x: S.mul[x, S.r[x]] == x),
    Law("DR3-D", ("all",), lambda S, x: S.r[S.d[x]] == S.d[x]),
    Law("DR3-R", ("all",), lambda S, x: S.d[S.r[x]] == S.r[x]),
    Law("DR4", ("all", "all"), _dr4),
    Law("DR5", ("all", "all"), _dr5),
)

CONGRUENCE_LAWS = (
    Law(
        "D-congruence",
        ("all", "all"),
        lambda S, x, y: S.d[S.mul[x, y]] == S.d[S.mul[x, S.d[y]]],
    ),
    Law(
        "R-congruence",
        ("all", "all"),
        lambda S, x, y: S.r[S.mul[x, y]] == S.r[S.mul[S.r[x], y]],
    ),
)


def _cat(S, x, y):
    return S.r[x] == S.d[y]


def _trace(S, x, y):
    xy = S.mul[x, y]
    return (S.d[xy] == S.d[x]) & (S.r[xy] == S.r[y])


CAT_SEMIGROUP_LAWS = (
    Law("cat=>trace", ("all", "all"), lambda S, x, y: ~_cat(S, x, y) | _trace(S, x, y)),
)
TRACE_CAT_LAWS = (
    Law("trace=>cat", ("all", "all"), lambda S, x, y: ~_trace(S, x, y) | _cat(S, x, y)),
)


def _left_ample(S, x, e):
    xe = S.mul[x, e]
    return xe == S.mul[S.d[xe], x]


def _right_ample(S, x, e):
    ex = S.mul[e, x]
    return ex == S.mul[x, S.r[ex]]


AMPLE_LAWS = (
    Law("left-ample", ("all", "proj"), _left_ample),
    Law("right-ample", ("all", "proj"), _right_ample),
)


def _gen_left(S, x, y):
    a = S.r[S.mul[S.d[S.mul[x, y]], x]]
    return S.d[S.mul[a, y]] == a


def _gen_right(S, x, y):
    b = S.d[S.mul[y, S.r[S.mul[x, y]]]]
    return S.r[S.mul[x, b]] == b


GENERALIZED_AMPLE_LAWS = (
    Law("generalized-left-ample", ("all", "all"), _gen_left),
    Law("generalized-right-ample", ("all", "all"), _gen_right),
)

COMMUTE_LAWS = (
    Law("projections-commute", ("proj", "proj"), lambda S, e, f: S.mul[e, f] == S.mul[f, e]),
)
COMMUTE_INTERNAL = (
    Law(
        "product-is-projection",
        ("proj", "proj"),
        lambda S, e, f: S.d[S.mul[e, f]] == S.mul[e, f],
    ),
)


def _smallest_d(S, x, e):
    return (S.mul[e, x] != x) | S.natural[S.d[x], e]


def _smallest_r(S, x, e):
    return (S.mul[x, e] != x) | S.natural[S.r[x], e]


def _d_bound(S, x, y):
    mid = S.d[S.mul[x, S.d[y]]]
    return S.natural[S.d[S.mul[x, y]], mid] & S.natural[mid, S.d[x]]


def _r_bound(S, x, y):
    mid = S.r[S.mul[S.r[x], y]]
    return S.natural[S.r[S.mul[x, y]], mid] & S.natural[mid, S.r[y]]


def _d_absorb(S, x, y):
    dxy = S.d[S.mul[x, y]]
    return dxy == S.d[S.mul[dxy, x]]


def _r_absorb(S, x, y):
    rxy = S.r[S.mul[x, y]]
    return rxy == S.r[S.mul[y, rxy]]


LEMMA_LAWS = (
    Law("D-smallest", ("all", "proj"), _smallest_d),
    Law("R-smallest", ("all", "proj"), _smallest_r),
    Law("D-bounds", ("all", "all"), _d_bound),
    Law("R-bounds", ("all", "all"), _r_bound),
    Law("D-absorb", ("all", "all"), _d_absorb),
    Law("R-absorb", ("all", "all"), _r_absorb),
)


def _monotone(T, s1, t1, s2, t2):
    le = T.order
    return ~(le[s1, t1] & le[s2, t2]) | le[T.mul[s1, s2], T.mul[t1, t2]]


MONOTONE_LAWS = (Law("monotone", ("all", "all", "all", "all"), _monotone),)

SEMIGROUP_LAWS: dict[str, Law] = {
    law.name: law
    for group in (
        (ASSOCIATIVITY,),
        DR_LAWS,
        CONGRUENCE_LAWS,
        CAT_SEMIGROUP_LAWS,
        TRACE_CAT_LAWS,
        AMPLE_LAWS,
        GENERALIZED_AMPLE_LAWS,
        COMMUTE_LAWS,
        COMMUTE_INTERNAL,
        LEMMA_LAWS,
    )
    for law in group
}


def _scan_associativity(mul: np.ndarray, room: int):
    # row x at a time: (xy)z is a row gather, x(yz) a gather from row x
    n = mul.shape[0]
    small = mul.astype(np.int16) if n < 1 << 15 else mul
    buf = np.empty((n, n), dtype=small.dtype)
    failures = 0
    found: list[Witness] = []
    for x in range(n):
        np.take(small[x], mul, out=buf)
        bad = small[mul[x]] != buf
        count = int(np.count_nonzero(bad))
        if count and len(found) < room:
            for y, z in np.argwhere(bad)[: room - len(found)]:
                found.append(Witness("associativity", (x, int(y), int(z))))
        failures += count
    return failures, n ** 3, found


def check_associativity(S: FiniteBiunarySemigroup, max_witnesses=DEFAULT_MAX_WITNESSES):
    failures, checked, found = _scan_associativity(S.mul, max_witnesses)
    return CheckReport("associativity", failures == 0, tuple(found), failures, checked)


def check_dr_axioms(S: FiniteBiunarySemigroup, max_witnesses=DEFAULT_MAX_WITNESSES):
    assoc = S.associativity_report
    if not assoc.holds:
        return CheckReport.blocked("dr", assoc)
    return run_laws("dr", S, DR_LAWS, max_witnesses)


def _gated(name, S, laws, max_witnesses, internal=()):
    if not S.is_dr:
        return CheckReport.blocked(name, S.dr_report)
    return run_laws(name, S, laws, max_witnesses, internal)


def require_dr(S: FiniteBiunarySemigroup, what: str = "operation") -> None:
    if not S.is_dr:
        raise PreconditionError(f"{what} requires a DR-semigroup", S.dr_report)


def check_congruence_conditions(S, max_witnesses=DEFAULT_MAX_WITNESSES):
    return _gated("congruence", S, CONGRUENCE_LAWS, max_witnesses)


def check_cat_semigroup(S, max_witnesses=DEFAULT_MAX_WITNESSES):
    return _gated("cat-semigroup", S, CAT_SEMIGROUP_LAWS, max_witnesses)


def check_trace_cat(S, max_witnesses=DEFAULT_MAX_WITNESSES):
    """The converse implication: trace(x, y) implies cat(x, y) for all pairs."""
    return _gated("trace-cat", S, TRACE_CAT_LAWS, max_witnesses)


def check_ample(S, max_witnesses=DEFAULT_MAX_WITNESSES):
    return _gated("ample", S, AMPLE_LAWS, max_witnesses)


def check_generalized_ample(S, max_witnesses=DEFAULT_MAX_WITNESSES, side: str = "both"):
    laws = {
        "both": GENERALIZED_AMPLE_LAWS,
        "left": GENERALIZED_AMPLE_LAWS[:1],
        "right": GENERALIZED_AMPLE_LAWS[1:],
    }[side]
    return _gated("generalized-ample", S, laws, max_witnesses)


def check_projections_commute(S, max_witnesses=DEFAULT_MAX_WITNESSES):
    return _gated("projections-commute", S, COMMUTE_LAWS, max_witnesses, COMMUTE_INTERNAL)


def verify_dr_lemmas(S, max_witnesses=DEFAULT_MAX_WITNESSES):
    return _gated("dr-lemmas", S, LEMMA_LAWS, max_witnesses)


def check_monotone(S, order: Relation | None = None, max_witnesses=DEFAULT_MAX_WITNESSES):
    """Multiplication is monotone in ``order`` (default: the right order)."""
    if not S.is_dr:
        return CheckReport.blocked("monotone", S.dr_report)
    order = leq_r(S) if order is None else order
    return run_laws("monotone", OrderedTable(S, order.m), MONOTONE_LAWS, max_witnesses)


class OrderedTable(NamedTuple):
    """A semigroup paired with an order matrix, as seen by order laws."""

    S: FiniteBiunarySemigroup
    order: np.ndarray

    @property
    def mul(self):
        return self.S.mul

    def domain(self, kind):
        return self.S.domain(kind)


# --------------------------------------------------------------------------
# derived structure


def cat_pred(S: FiniteBiunarySemigroup, x: int, y: int) -> bool:
    return bool(_cat(S, x, y))


def trace_pred(S: FiniteBiunarySemigroup, x: int, y: int) -> bool:
    return bool(_trace(S, x, y))


def projections(S: FiniteBiunarySemigroup) -> frozenset[int]:
    require_dr(S, "projections")
    ds = set(S.d.tolist())
    if ds != set(S.r.tolist()):
        raise TheoremViolation("D(S) differs from R(S)")
    return frozenset(ds)


def natural_order(S: FiniteBiunarySemigroup) -> Relation:
    """``e <= f`` iff ``e = ef = fe``, on projections only.

    Rows and columns of non-projections are all false.
    """
    require_dr(S, "natural_order")
    P = S.projection_indices
    block = S.mul[np.ix_(P, P)]
    sub = (block == P[:, None]) & (block.T == P[:, None])
    m = np.zeros((S.n, S.n), dtype=bool)
    m[np.ix_(P, P)] = sub
    return Relation(m)


def leq_r(S: FiniteBiunarySemigroup) -> Relation:
    require_dr(S, "leq_r")
    s = np.arange(S.n)[:, None]
    t = np.arange(S.n)[None, :]
    N = S.natural
    return Relation(N[S.d[s], S.d[t]] & (S.mul[S.d[s], t] == s))


def leq_l(S: FiniteBiunarySemigroup) -> Relation:
    require_dr(S, "leq_l")
    s = np.arange(S.n)[:, None]
    t = np.arange(S.n)[None, :]
    N = S.natural
    return Relation(N[S.r[s], S.r[t]] & (S.mul[t, S.r[s]] == s))


def bideterministic(S: FiniteBiunarySemigroup) -> frozenset[int]:
    """Elements satisfying both ample equations against every projection."""
    require_dr(S, "bideterministic")
    x = np.arange(S.n)[:, None]
    e = S.projection_indices[None, :]
    ok = (_left_ample(S, x, e) & _right_ample(S, x, e)).all(axis=1)
    members = np.flatnonzero(ok)
    prods = S.mul[np.ix_(members, members)]
    if not ok[prods].all():
        raise TheoremViolation("B(S) is not closed under multiplication")
    return frozenset(members.tolist())


def b_closed_under_dr(S: FiniteBiunarySemigroup) -> bool:
    B = np.fromiter(bideterministic(S), dtype=np.intp)
    inside = np.zeros(S.n, dtype=bool)
    inside[B] = True
    return bool(inside[S.d[B]].all() and inside[S.r[B]].all())


def derive_dr_from_e(
    mul, E: Iterable[int], labels: Sequence[str] | None = None
) -> FiniteBiunarySemigroup:
    """Define D(s), R(s) as the least e in E with es = s (resp. se = s).

    The order on E is the natural order of idempotents.  Raises
    :class:`NoSmallestProjection` when some minimum does not exist.
    """
    mul = np.array(mul, dtype=np.intp)
    n = mul.shape[0]
    E = np.array(sorted(set(int(e) for e in E)), dtype=np.intp)
    if E.size == 0:
        raise NoSmallestProjection(0, "D")
    if (mul[E, E] != E).any():
        raise ValueError("E must consist of idempotents")
    probe = FiniteBiunarySemigroup(mul, np.zeros(n), np.zeros(n))
    if not probe.associativity_report.holds:
        raise ValueError("mul is not associative")
    block = mul[np.ix_(E, E)]
    le = (block == E[:, None]) & (block.T == E[:, None])
    s = np.arange(n)
    d = _least(mul[E[:, None], s[None, :]] == s[None, :], le, E, "D")
    r = _least(mul[s[None, :], E[:, None]] == s[None, :], le, E, "R")
    S = FiniteBiunarySemigroup(mul, d, r, labels)
    if not S.is_dr:
        raise TheoremViolation("least-idempotent construction is not a DR-semigroup")
    return S


def _least(cand: np.ndarray, le: np.ndarray, E: np.ndarray, direction: str):
    # cand[i, s]: E[i] fixes s; least candidate is below every candidate
    out = np.empty(cand.shape[1], dtype=np.intp)
    for s in range(cand.shape[1]):
        c = np.flatnonzero(cand[:, s])
        least = [i for i in c if le[i, c].all()]
        if len(least) != 1:
            raise NoSmallestProjection(s, direction)
        out[s] = E[least[0]]
    return out


def is_inverse_dr(S: FiniteBiunarySemigroup) -> bool:
    """True when S is an inverse semigroup with D(x) = xx', R(x) = x'x."""
    mul = S.mul
    x = np.arange(S.n)[:, None]
    y = np.arange(S.n)[None, :]
    inv = (mul[mul[x, y], x] == x) & (mul[mul[y, x], y] == y)
    if not (inv.sum(axis=1) == 1).all():
        return False
    xinv = inv.argmax(axis=1)
    s = np.arange(S.n)
    return bool(
        np.array_equal(S.d, mul[s, xinv]) and np.array_equal(S.r, mul[xinv, s])
    )
