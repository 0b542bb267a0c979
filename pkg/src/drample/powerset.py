"""Subsets of a partial category as a DR-semigroup.

A subset is an ``int`` bitmask over the parent's element indices (bit ``i``
is element ``i``).  :class:`PowerSetSemigroup` answers products and D/R
lazily; :meth:`PowerSetSemigroup.materialize` builds the full table when
``2**n`` is within the cap.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import (
    DEFAULT_MAX_WITNESSES,
    CheckReport,
    FiniteBiunarySemigroup,
    PreconditionError,
    TheoremViolation,
    Witness,
    check_ample,
)
from .esn import BiunaryMap, derive_CS, is_dr_morphism
from .pcat import FinitePartialCategory

DEFAULT_SUBSET_CAP = 1 << 10


class CapExceeded(RuntimeError):
    pass


class ParentMismatch(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(members: Iterable[int]) -> int:
    out = 0
    for i in members:
        out |= 1 << int(i)
    return out


def format_subset(mask: int, labels: Sequence[str] | None = None) -> str:
    names = [labels[i] if labels else str(i) for i in bits(mask)]
    return "{" + ",".join(names) + "}"


class PowerSetSemigroup:
    """All subsets of ``parent`` under AB = {a o b}, with down-set D and R."""

    def __init__(self, parent: FinitePartialCategory, cap: int = DEFAULT_SUBSET_CAP):
        rep = parent.partial_category_report
        if not rep.holds:
            raise PreconditionError("power sets need a partial category", rep)
        self.parent = parent
        self.cap = cap
        n = parent.n
        le = parent.identity_order.m
        self._down = [mask_of(np.flatnonzero(le[:, e])) for e in range(n)]
        self._dmask = [self._down[parent.d[a]] for a in range(n)]
        self._rmask = [self._down[parent.r[a]] for a in range(n)]
        self._partners = [mask_of(np.flatnonzero(parent.defined[a])) for a in range(n)]
        self._cbit = [
            [(1 << int(c)) if c >= 0 else 0 for c in parent.comp[a]] for a in range(n)
        ]

    @property
    def n(self) -> int:
        """Number of subsets."""
        return 1 << self.parent.n

    def op(self, A: int, B: int) -> int:
        out = 0
        for a in bits(A):
            row = self._cbit[a]
            for b in bits(B & self._partners[a]):
                out |= row[b]
        return out

    def dom(self, A: int) -> int:
        out = 0
        for a in bits(A):
            out |= self._dmask[a]
        return out

    def ran(self, A: int) -> int:
        out = 0
        for a in bits(A):
            out |= self._rmask[a]
        return out

    def label(self, A: int) -> str:
        return format_subset(A, self.parent.labels)

    def down_set(self, e: int) -> int:
        return self._down[e]

    def materialize(self, labels: bool = True) -> FiniteBiunarySemigroup:
        """The full table; element ``i`` is the subset with bitmask ``i``."""
        k = self.parent.n
        size = 1 << k
        if size > self.cap:
            raise CapExceeded(f"2**{k} subsets exceed the cap of {self.cap}")
        single = []
        for a in range(k):
            row = np.zeros(size, dtype=np.int64)
            for j in range(k):
                row[1 << j:1 << (j + 1)] = row[: 1 << j] | self._cbit[a][j]
            single.append(row)
        mul = np.zeros((size, size), dtype=np.int64)
        d = np.zeros(size, dtype=np.int64)
        r = np.zeros(size, dtype=np.int64)
        for j in range(k):
            lo, hi = 1 << j, 1 << (j + 1)
            mul[lo:hi] = mul[:lo] | single[j][None, :]
            d[lo:hi] = d[:lo] | self._dmask[j]
            r[lo:hi] = r[:lo] | self._rmask[j]
        names = tuple(self.label(i) for i in range(size)) if labels else None
        return FiniteBiunarySemigroup(mul, d, r, names)


def powerset_semigroup(C: FinitePartialCategory, cap: int = DEFAULT_SUBSET_CAP) -> PowerSetSemigroup:
    return PowerSetSemigroup(C, cap)


@dataclass(frozen=True)
class SubsetElement:
    parent: PowerSetSemigroup
    mask: int

    @classmethod
    def of(cls, parent: PowerSetSemigroup, members: Iterable[int]) -> "SubsetElement":
        return cls(parent, mask_of(members))

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(bits(self.mask))

    def __str__(self) -> str:
        return self.parent.label(self.mask)

    def _same(self, other: "SubsetElement") -> None:
        if other.parent is not self.parent:
            raise ParentMismatch("subsets of different parents")

    def __mul__(self, other: "SubsetElement") -> "SubsetElement":
        self._same(other)
        return SubsetElement(self.parent, self.parent.op(self.mask, other.mask))


def subset_product(A: SubsetElement, B: SubsetElement) -> SubsetElement:
    return A * B


def subset_D(A: SubsetElement) -> SubsetElement:
    return SubsetElement(A.parent, A.parent.dom(A.mask))


def subset_R(A: SubsetElement) -> SubsetElement:
    return SubsetElement(A.parent, A.parent.ran(A.mask))


# --------------------------------------------------------------------------
# bideterministic subsets and partial isometries


def _pairwise(C: FinitePartialCategory, mask: int):
    idx = np.fromiter(bits(mask), dtype=np.intp)
    le = C.identity_order.m
    a, b = idx[:, None], idx[None, :]
    return a, b, le[C.d[a], C.d[b]], le[C.r[a], C.r[b]]


def is_bideterministic_subset(C: FinitePartialCategory, mask: int) -> bool:
    """D(a) <= D(b) exactly when R(a) <= R(b), for all members a, b."""
    _, _, ld, lr = _pairwise(C, mask)
    return bool((ld == lr).all())


def is_partial_isometry(C: FinitePartialCategory, mask: int) -> bool:
    a, b, ld, lr = _pairwise(C, mask)
    if not (ld == lr).all():
        return False
    return bool(((C.d[a] != C.d[b]) | (a == b)).all())


def _compatible(C: FinitePartialCategory) -> np.ndarray:
    le = C.identity_order.m
    a = np.arange(C.n)[:, None]
    b = np.arange(C.n)[None, :]
    same = le[C.d[a], C.d[b]] == le[C.r[a], C.r[b]]
    return same & ((C.d[a] != C.d[b]) | (a == b))


def partial_isometries(C: FinitePartialCategory, cap: int = 1 << 16) -> list[int]:
    """Every partial isometry of C as a bitmask, in increasing mask order.

    The defining condition is pairwise, so these are the cliques of the
    compatibility graph; enumeration stops with :class:`CapExceeded` beyond
    ``cap`` results.
    """
    ok = _compatible(C)
    nbr = [mask_of(np.flatnonzero(ok[a])) & ~((1 << (a + 1)) - 1) for a in range(C.n)]
    out = [0]

    def grow(current: int, allowed: int):
        for a in bits(allowed):
            nxt = current | (1 << a)
            out.append(nxt)
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} partial isometries")
            grow(nxt, allowed & nbr[a])

    grow(0, mask_of(range(C.n)))
    return sorted(out)


def random_partial_isometry(C: FinitePartialCategory, rng: random.Random) -> int:
    """Greedy random member of PI(C): each compatible element joins with p=1/2."""
    ok = _compatible(C)
    order = list(range(C.n))
    rng.shuffle(order)
    chosen: list[int] = []
    for a in order:
        if rng.random() < 0.5 and all(ok[a, b] for b in chosen):
            chosen.append(a)
    return mask_of(chosen)


def subsemigroup_on(P: PowerSetSemigroup, masks: Sequence[int]) -> FiniteBiunarySemigroup:
    """Tabulate P restricted to ``masks``, which must be closed under the operations."""
    index = {m: i for i, m in enumerate(masks)}
    k = len(masks)
    mul = np.empty((k, k), dtype=np.intp)
    try:
        for i, A in enumerate(masks):
            for j, B in enumerate(masks):
                mul[i, j] = index[P.op(A, B)]
        d = [index[P.dom(A)] for A in masks]
        r = [index[P.ran(A)] for A in masks]
    except KeyError as exc:
        raise ValueError(f"subset {exc} escapes the given family") from None
    return FiniteBiunarySemigroup(mul, d, r, tuple(P.label(m) for m in masks))


def partial_isometry_semigroup(C: FinitePartialCategory, cap: int = 1 << 12):
    """PI(C) as a finite DR-semigroup, with the bitmask of each element."""
    masks = partial_isometries(C, cap)
    P = PowerSetSemigroup(C)
    try:
        return subsemigroup_on(P, masks), masks
    except ValueError as exc:
        raise TheoremViolation(f"PI(C) is not closed: {exc}") from None


def generated_subsemigroup(P: PowerSetSemigroup, gens: Sequence[int], limit: int = 1 << 12):
    """Closure of ``gens`` under product, D and R; generators keep indices 0..k-1."""
    masks = list(dict.fromkeys(gens))
    seen = set(masks)
    i = 0
    while i < len(masks):
        A = masks[i]
        new = [P.dom(A), P.ran(A)]
        for B in masks[: i + 1]:
            new += [P.op(A, B), P.op(B, A)]
        for m in new:
            if m not in seen:
                seen.add(m)
                masks.append(m)
                if len(masks) > limit:
                    raise CapExceeded(f"generated subsemigroup exceeds {limit} elements")
        i += 1
    return subsemigroup_on(P, masks), masks


# --------------------------------------------------------------------------
# embedding into partial isometries


def embedding_map(S: FiniteBiunarySemigroup) -> BiunaryMap:
    """s -> principal down-set of s, into the lazy power set of C(S)."""
    amp = check_ample(S)
    if not amp.holds:
        raise PreconditionError("the embedding needs the ample conditions", amp)
    C = derive_CS(S)
    P = PowerSetSemigroup(C.pc)
    images = tuple(mask_of(np.flatnonzero(C.le[:, s])) for s in range(S.n))
    return BiunaryMap(S, P, images)


def check_embedding(S: FiniteBiunarySemigroup, max_witnesses=DEFAULT_MAX_WITNESSES) -> CheckReport:
    """Injectivity, partial-isometry images and the DR-morphism laws."""
    f = embedding_map(S)
    pc = f.target.parent
    bad: list[Witness] = []
    bad += [Witness("partial-isometry", (s,)) for s in range(S.n) if not is_partial_isometry(pc, f(s))]
    seen: dict[int, int] = {}
    for s in range(S.n):
        if f(s) in seen:
            bad.append(Witness("injective", (seen[f(s)], s)))
        seen.setdefault(f(s), s)
    morph = is_dr_morphism(f, max_witnesses)
    bad += list(morph.witnesses)
    failures = len(bad) - len(morph.witnesses) + morph.failures
    return CheckReport(
        "embedding",
        failures == 0,
        tuple(bad[:max_witnesses]),
        failures,
        2 * S.n + morph.checked,
    )
