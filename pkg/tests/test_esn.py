import itertools

import numpy as np
import pytest

from drample import core, esn, examples, formats
from drample.core import PreconditionError, Witness
from drample.esn import (
    APC_LAW_TABLE,
    BiunaryMap,
    cat_trace_product,
    check_apc,
    derive_CS,
    functor_of,
    identity_map,
    is_ample_functor,
    is_dr_morphism,
    matching_term,
    maximal_pair,
    morphism_of,
    pseudoproduct,
    restriction,
    corestriction,
    roundtrip_C,
    roundtrip_S,
    split_product,
)
from drample.pcat import UNDEFINED, is_category

GENERALIZED_ONLY = (2, 2)  # members, of which PC3 holds for the product
GOOD_FIXTURES = ["z2.apc", "chain2.apc", "chain3.apc", "vee.apc", "i2_groupoid.apc"]


@pytest.fixture(scope="module")
def ample(corpus4, curated):
    pool = list(corpus4) + [S for _, S in curated]
    return [S for S in pool if core.check_ample(S).holds]


def semilattice():
    return examples.closure_powerset(2, examples.identity_closure(2))


def load(fixtures_dir, name):
    return formats.load(fixtures_dir / name)


# -- the (cat,trace)-product --------------------------------------------------


def test_semilattice_product_is_diagonal():
    C = cat_trace_product(semilattice())
    assert all((C.comp[e, f] != UNDEFINED) == (e == f) for e in range(4) for f in range(4))
    assert all(C.comp[e, e] == e for e in range(4))


def test_needs_ample(corpus3):
    bad = next(S for S in corpus3 if not core.check_ample(S).holds)
    with pytest.raises(PreconditionError):
        cat_trace_product(bad)


def test_product_is_partial_category_and_category_iff_cat_semigroup(ample):
    for S in ample:
        C = cat_trace_product(S)
        assert C.partial_category_report.holds
        assert is_category(C) == core.check_cat_semigroup(S).holds


def test_inverse_members_use_restricted_product(ample):
    seen = 0
    for S in ample:
        if core.is_inverse_dr(S):
            seen += 1
            C = cat_trace_product(S)
            x, y = np.arange(S.n)[:, None], np.arange(S.n)[None, :]
            restricted = np.where(S.r[x] == S.d[y], S.mul, UNDEFINED)
            assert np.array_equal(C.comp, restricted)
    assert seen


def test_partial_isometries_of_interval_give_non_category():
    S, _ = examples.partial_isometry_semigroup(examples.interval_partial_category(0, 3, 2))
    assert core.check_ample(S).holds
    C = cat_trace_product(S)
    assert C.partial_category_report.holds and not is_category(C)


def test_ample_product_factors(ample):
    for S in ample:
        C = cat_trace_product(S)
        for x, y in itertools.product(range(S.n), repeat=2):
            a, b = split_product(S, x, y)
            assert C.comp[a, b] == S.mul[x, y]


def test_cat_alone_decides_composability_for_cat_semigroups(ample):
    for S in ample:
        if core.check_cat_semigroup(S).holds:
            C = cat_trace_product(S)
            x, y = np.arange(S.n)[:, None], np.arange(S.n)[None, :]
            assert np.array_equal(C.defined, S.r[x] == S.d[y])


def test_generalized_ample_without_ample_observed(corpus4):
    # observed data on the enumerated corpus, not a general claim
    members = [
        S for S in corpus4
        if core.check_generalized_ample(S).holds and not core.check_ample(S).holds
    ]
    pc3 = [cat_trace_product(S, require_ample=False).partial_category_report.holds for S in members]
    assert (len(members), sum(pc3)) == GENERALIZED_ONLY


# -- C(S) and the axioms ------------------------------------------------------


def test_derived_categories_pass_apc(ample):
    for S in ample:
        C = derive_CS(S)
        rep = C.apc_report
        assert rep.holds and rep.consistent, rep
        assert set(C.pc.identities.tolist()) == core.projections(S)


def test_semilattice_order_is_semilattice_order():
    S = semilattice()
    C = derive_CS(S)
    assert C.order == core.natural_order(S)


def test_restriction_semigroups_give_categories(ample):
    for S in ample:
        if core.check_congruence_conditions(S).holds:
            assert is_category(derive_CS(S).pc)


def test_hand_built_fixtures_pass(fixtures_dir):
    for name in GOOD_FIXTURES:
        C = load(fixtures_dir, name)
        rep = check_apc(C.pc, C.order)
        assert rep.holds and rep.consistent, (name, rep)


def test_equality_order_on_non_category_fails_apc5(fixtures_dir):
    C = load(fixtures_dir, "interval_equality.apc")
    rep = check_apc(C.pc, C.order, max_witnesses=50)
    assert not rep.holds
    assert Witness("APC5", (1, 3)) in rep.witnesses
    assert {w.law for w in rep.witnesses} == {"APC5"}
    with pytest.raises(PreconditionError):
        pseudoproduct(C)


def test_apc_witnesses_reexhibit_failures(fixtures_dir):
    C = load(fixtures_dir, "chain3.apc")
    # reverse part of the order: 2 <= 1 as well, antisymmetry and more fail
    m = C.order.m.copy()
    m[2, 1] = True
    broken = esn.AmplePartialCategory(C.pc, core.Relation(m))
    rep = check_apc(broken.pc, broken.order, max_witnesses=20)
    assert not rep.holds
    for w in rep.witnesses:
        law = APC_LAW_TABLE[w.law]
        assert not bool(law.test(broken, *map(np.intp, w.elements)))


def test_identity_meets(ample):
    for S in ample:
        C = derive_CS(S)
        E = C.pc.identities
        for e, f in itertools.product(E, repeat=2):
            lower = [g for g in E if C.le[g, e] and C.le[g, f]]
            tops = [g for g in lower if all(C.le[h, g] for h in lower)]
            assert len(tops) == 1


# -- matching terms, restrictions, maximal pairs ------------------------------


def test_matching_term_examples(ample):
    for S in ample:
        C = derive_CS(S)
        for e in C.pc.identities:
            assert matching_term(C, e, e) == e
        for x, y in itertools.product(range(S.n), repeat=2):
            assert matching_term(C, x, y) == S.r[S.mul[S.d[S.mul[x, y]], x]]


def test_ehresmann_matching_term_is_meet(ample):
    for S in ample:
        if not core.check_congruence_conditions(S).holds:
            continue
        C = derive_CS(S)
        for x, y in itertools.product(range(S.n), repeat=2):
            assert matching_term(C, x, y) == S.mul[S.r[x], S.d[y]]


def test_maximal_pair_is_split_product(ample):
    for S in ample:
        C = derive_CS(S)
        for x, y in itertools.product(range(S.n), repeat=2):
            assert maximal_pair(C, x, y) == split_product(S, x, y)


def test_maximal_pairs_by_brute_force(ample):
    for S in ample[:40]:
        C = derive_CS(S)
        le = C.le
        for x, y in itertools.product(range(S.n), repeat=2):
            cands = [
                (a, b)
                for a in range(S.n) for b in range(S.n)
                if le[a, x] and le[b, y] and C.comp[a, b] != UNDEFINED
            ]
            tops = [p for p in cands if all(le[q[0], p[0]] and le[q[1], p[1]] for q in cands)]
            assert tops == [maximal_pair(C, x, y)]


def test_restrictions(ample):
    S = semilattice()
    C = derive_CS(S)
    for e, f in itertools.product(range(4), repeat=2):
        if C.le[e, f]:
            assert restriction(C, f, e) == e and corestriction(C, f, e) == e
    for S in ample:
        C = derive_CS(S)
        for y in range(S.n):
            assert restriction(C, y, int(C.d[y])) == y
            assert corestriction(C, y, int(C.r[y])) == y
            for e in C.pc.identities:
                # e|y exists exactly when D(ey) = e, and is then ey
                if C.le[e, C.d[y]]:
                    ey = S.mul[e, y]
                    assert restriction(C, y, int(e)) == (ey if S.d[ey] == e else None)
                if C.le[e, C.r[y]]:
                    ye = S.mul[y, e]
                    assert corestriction(C, y, int(e)) == (ye if S.r[ye] == e else None)


def test_restriction_rejects_bad_identity():
    C = derive_CS(semilattice())
    with pytest.raises(ValueError):
        restriction(C, 1, 3)  # {0,1} is not below {0}


# -- pseudoproduct and round trips --------------------------------------------


def test_roundtrips_over_corpus(ample):
    for S in ample:
        assert roundtrip_S(S).holds
        assert roundtrip_C(derive_CS(S)).holds


def test_roundtrips_on_fixtures(fixtures_dir):
    for name in GOOD_FIXTURES:
        C = load(fixtures_dir, name)
        assert roundtrip_C(C).holds, name
        S = pseudoproduct(C)
        assert core.check_ample(S).holds
        assert roundtrip_S(S).holds


def test_pseudoproduct_properties(fixtures_dir, ample):
    Cs = [load(fixtures_dir, n) for n in GOOD_FIXTURES] + [derive_CS(S) for S in ample]
    for C in Cs:
        S = pseudoproduct(C)
        assert core.check_associativity(S).holds and S.is_dr
        assert np.array_equal(S.d, C.d)
        E = C.pc.identities
        for e, f in itertools.product(E, repeat=2):
            lower = [g for g in E if C.le[g, e] and C.le[g, f]]
            assert S.mul[e, f] in lower and all(C.le[g, S.mul[e, f]] for g in lower)
        for s in range(C.n):
            assert S.mul[C.d[s], s] == s


def test_groupoid_fixture_gives_inverse_monoid(fixtures_dir):
    S = pseudoproduct(load(fixtures_dir, "i2_groupoid.apc"))
    I2 = examples.symmetric_inverse_monoid(2)
    assert examples.canonical_key(S.mul, S.d, S.r)[0] == examples.canonical_key(I2.mul, I2.d, I2.r)[0]
    assert core.is_inverse_dr(S)


def test_z2_fixture_is_the_group():
    from pathlib import Path

    C = formats.load(Path(__file__).parent / "fixtures" / "z2.apc")
    S = pseudoproduct(C)
    assert S.mul.tolist() == [[0, 1], [1, 0]]


# -- morphisms and functors ---------------------------------------------------


def test_identity_maps(ample, fixtures_dir):
    for S in ample[:20]:
        assert is_dr_morphism(identity_map(S)).holds
        assert is_ample_functor(identity_map(derive_CS(S))).holds
    C = load(fixtures_dir, "i2_groupoid.apc")
    assert is_ample_functor(identity_map(C)).holds


def test_constant_maps_to_projections(ample):
    for S in ample[:10]:
        for T in ample[:10]:
            for e in core.projections(T):
                f = BiunaryMap(S, T, [e] * S.n)
                assert is_dr_morphism(f).holds  # e e = e, D(e) = R(e) = e


def test_dr_morphism_witnesses():
    S = semilattice()
    swap = BiunaryMap(S, S, [0, 2, 1, 3])
    assert is_dr_morphism(swap).holds
    collapse = BiunaryMap(S, S, [0, 1, 1, 3])  # {0} and {1} both to {0}
    rep = is_dr_morphism(collapse)
    assert not rep.holds
    assert Witness("hom", (1, 2)) in rep.witnesses


def _small_ample_pairs(ample):
    small = [S for S in ample if S.n <= 3]
    for S, T in itertools.product(small, repeat=2):
        for m in itertools.product(range(T.n), repeat=S.n):
            f = BiunaryMap(S, T, m)
            if is_dr_morphism(f).holds:
                yield f


def test_functors_from_morphisms(ample):
    count = 0
    for f in _small_ample_pairs(ample):
        g = functor_of(f)
        rep = is_ample_functor(g)
        assert rep.holds and rep.consistent, rep
        assert is_dr_morphism(morphism_of(g)).holds
        count += 1
    assert count > 50


def test_order_preserving_functor_missing_matching_terms(fixtures_dir):
    vee = load(fixtures_dir, "vee.apc")
    chain = load(fixtures_dir, "chain2.apc")
    g = BiunaryMap(vee, chain, [0, 1, 1])
    rep = is_ample_functor(g)
    assert not rep.holds
    assert {w.law for w in rep.witnesses} == {"matching-term"}
    assert Witness("matching-term", (1, 2)) in rep.witnesses
    assert not is_dr_morphism(morphism_of(g)).holds


def test_functor_needs_apcs(fixtures_dir):
    bad = load(fixtures_dir, "interval_equality.apc")
    with pytest.raises(PreconditionError):
        is_ample_functor(identity_map(bad))
