import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from drample import pcat
from drample.core import PreconditionError, Relation, Witness
from drample.pcat import (
    FinitePartialCategory,
    NotPreorder,
    NotSaturated,
    SaturatedSubset,
    check_category,
    check_partial_category,
    chain,
    interval_partial_category,
    is_category,
    path_category_truncation,
    posetal_category,
    saturated_restrict,
)


def index_of(C, label):
    return [C.label(i) for i in range(C.n)].index(label)


def generated():
    out = [posetal_category(chain(k)) for k in range(1, 5)]
    out += [posetal_category(Relation.equality(3))]
    out += [posetal_category(Relation(np.ones((2, 2), dtype=bool)))]
    out += [interval_partial_category(0, 6, b) for b in (1, 2, 3)]
    out += [
        path_category_truncation(3, [(0, 1), (1, 2)], 1),
        path_category_truncation(3, [(0, 1), (1, 2)], 2),
        path_category_truncation(2, [(0, 1), (1, 0)], 3),
        path_category_truncation(1, [(0, 0), (0, 0)], 2),
    ]
    return out


def test_generated_instances_are_partial_categories():
    for C in generated():
        assert check_partial_category(C).holds, C
        comp = [list(map(int, row)) for row in C.comp]
        assert O.is_partial_category(comp, list(map(int, C.d)), list(map(int, C.r)))


def test_composites_keep_domain_and_range():
    for C in generated():
        for x, y in np.argwhere(C.defined):
            c = C.comp[x, y]
            assert C.d[c] == C.d[x] and C.r[c] == C.r[y]


def test_pc2_witness_for_injected_entry():
    C = posetal_category(chain(2))  # (0,0) (0,1) (1,1)
    comp = C.comp.copy()
    comp[1, 1] = 1  # (0,1)(0,1) defined although r != d
    bad = FinitePartialCategory(comp, C.d, C.r)
    rep = check_partial_category(bad)
    assert Witness("PC2", (1, 1)) in rep.witnesses


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 3]), st.data())
def test_axioms_agree_with_oracle_on_perturbed_tables(k, data):
    C = posetal_category(chain(k))
    comp = C.comp.copy()
    for _ in range(data.draw(st.integers(0, 3))):
        i = data.draw(st.integers(0, C.n - 1))
        j = data.draw(st.integers(0, C.n - 1))
        comp[i, j] = data.draw(st.integers(-1, C.n - 1))
    bad = FinitePartialCategory(comp, C.d, C.r)
    rep = check_partial_category(bad)
    table = [list(map(int, row)) for row in comp]
    assert rep.holds == O.is_partial_category(table, list(map(int, C.d)), list(map(int, C.r)))
    for w in rep.witnesses:
        assert not pcat.PCAT_LAWS[w.law].test(bad, *map(np.intp, w.elements))


def test_is_category_examples():
    assert is_category(posetal_category(chain(3)))
    P3 = interval_partial_category(0, 6, 3)
    assert not is_category(P3)
    x, y = index_of(P3, "(2,4)"), index_of(P3, "(4,6)")
    assert P3.op(x, y) is None and P3.r[x] == P3.d[y]
    assert P3.op(index_of(P3, "(2,3)"), index_of(P3, "(3,4)")) == index_of(P3, "(2,4)")


def test_is_category_needs_partial_category():
    C = posetal_category(chain(2))
    comp = C.comp.copy()
    comp[1, 1] = 1
    with pytest.raises(PreconditionError):
        is_category(FinitePartialCategory(comp, C.d, C.r))
    assert check_category(FinitePartialCategory(comp, C.d, C.r)).status == "precondition-failed"


def test_path_truncations():
    one = path_category_truncation(2, [(0, 1)], 1)
    assert one.n == 3 and is_category(one)
    # a->b->c: with paths of length 1 the two edges do not compose
    short = path_category_truncation(3, [(0, 1), (1, 2)], 1)
    assert short.n == 5 and not is_category(short)
    # length 2 covers every path of this graph, so the truncation is total
    assert is_category(path_category_truncation(3, [(0, 1), (1, 2)], 2))
    # a 3-edge path cut at 2 has e1e2 and e3 composable with total length 3
    assert not is_category(path_category_truncation(4, [(0, 1), (1, 2), (2, 3)], 2))


def test_path_element_order_and_labels():
    C = path_category_truncation(3, [(0, 1), (1, 2)], 2)
    assert [C.label(i) for i in range(C.n)] == ["0", "1", "2", "0>1", "1>2", "0>1>2"]
    loops = path_category_truncation(1, [(0, 0), (0, 0)], 1)
    assert [loops.label(i) for i in range(loops.n)] == ["0", "0>0", "0>0#1"]


def test_posetal_counts():
    assert posetal_category(chain(1)).n == 1
    two = posetal_category(chain(2))
    assert [two.label(i) for i in range(3)] == ["(0,0)", "(0,1)", "(1,1)"]
    for k in range(1, 7):
        assert posetal_category(chain(k)).n == k * (k + 1) // 2


def test_posetal_rejects_non_preorders():
    with pytest.raises(NotPreorder):
        posetal_category(Relation(np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]], dtype=bool)))


def test_interval_bound_one_is_discrete():
    C = interval_partial_category(0, 4, 1)
    assert all(C.d[i] == i == C.r[i] for i in range(C.n)) and C.n == 5


def test_saturated_restrict_gives_interval():
    C = posetal_category(chain(7))
    keep = [i for i in range(C.n) if eval(C.label(i))[1] - eval(C.label(i))[0] < 3]
    assert saturated_restrict(C, keep) == interval_partial_category(0, 6, 3)
    assert saturated_restrict(C, set(keep)) == interval_partial_category(0, 6, 3)


def test_saturated_examples():
    C = posetal_category(chain(3))
    assert saturated_restrict(C, range(C.n)) == C
    keep = [i for i in range(C.n) if i != index_of(C, "(1,1)")]
    with pytest.raises(NotSaturated):
        SaturatedSubset(C, keep)


def test_saturated_needs_category():
    with pytest.raises(PreconditionError):
        SaturatedSubset(interval_partial_category(0, 4, 2), [0])


def _saturated_oracle(C, members):
    return all(
        not (C.comp[a, b] >= 0 and C.comp[a, b] in members) or (a in members and b in members)
        for a in range(C.n) for b in range(C.n)
    )


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 4), st.data())
def test_saturated_subsets_agree_with_definition(k, data):
    C = posetal_category(chain(k))
    members = set(data.draw(st.sets(st.integers(0, C.n - 1), min_size=1)))
    if _saturated_oracle(C, members):
        sub = saturated_restrict(C, members)
        assert check_partial_category(sub).holds
        assert sub.n == len(members)
    else:
        with pytest.raises(NotSaturated):
            SaturatedSubset(C, members)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4), st.data())
def test_random_quasiorders_give_categories(k, data):
    bits = data.draw(st.lists(st.booleans(), min_size=k * k, max_size=k * k))
    m = np.array(bits, dtype=bool).reshape(k, k) | np.eye(k, dtype=bool)
    # transitive closure
    for mid in range(k):
        m |= m[:, [mid]] & m[[mid], :]
    C = posetal_category(Relation(m))
    assert is_category(C)
    assert C.n == int(m.sum())


def test_identity_order_defaults_to_equality():
    C = posetal_category(chain(2))
    assert C.identity_order == Relation.equality(C.n, C.identities)


def test_identity_order_must_be_partial_order():
    C = posetal_category(Relation.equality(2))
    full = Relation(np.ones((2, 2), dtype=bool))
    rep = check_partial_category(FinitePartialCategory(C.comp, C.d, C.r, full))
    assert any(w.law == "idorder-antisymmetric" for w in rep.witnesses)
