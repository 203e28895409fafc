"""Tests for repconf.posets against brute-force oracle values."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from repconf.errors import InputError, SizeBoundError
from repconf.posets import (
    FinitePoset, chain, connected_components, discrete, dominates,
    enumerate_partial_orders, f_sets, g_pairs, h_pairs, orders_between,
    orders_dominated_by,
)

# frozen from tests/oracles/oracle_posets.py
POSET_COUNTS = {1: 1, 2: 3, 3: 19, 4: 219, 5: 4231}
UNLABELED_COUNTS = {1: 1, 2: 2, 3: 5, 4: 16}
DOMINATED_PAIRS_ON_3 = 79
DOMINATED_PAIRS_ON_4 = 3221


@pytest.fixture(scope="module")
def small_posets():
    return {n: list(enumerate_partial_orders(range(1, n + 1)))
            for n in (1, 2, 3, 4)}


def test_enumeration_counts(small_posets):
    for n, expected in POSET_COUNTS.items():
        if n == 5:
            continue
        assert len(small_posets[n]) == expected


def test_enumeration_count_five_labels():
    assert len(list(enumerate_partial_orders("abcde"))) == POSET_COUNTS[5]


def test_enumeration_is_deterministic_and_duplicate_free(small_posets):
    again = list(enumerate_partial_orders(range(1, 4)))
    assert again == small_posets[3]
    assert len(set(small_posets[4])) == len(small_posets[4])


def test_enumeration_bound():
    with pytest.raises(SizeBoundError):
        list(enumerate_partial_orders(range(6)))
    # the bound is configurable
    assert len(list(enumerate_partial_orders(range(3), bound=3))) == 19


def test_constructor_closes_and_validates():
    p = FinitePoset([1, 2, 3], pairs=[(1, 2), (2, 3)])
    assert p.leq(1, 3)
    with pytest.raises(InputError):
        FinitePoset([1, 2], pairs=[(1, 2), (2, 1)])
    with pytest.raises(InputError):
        FinitePoset([1, 1])
    with pytest.raises(InputError):
        FinitePoset([1, 2], pairs=[(1, 7)])


def test_f_sets_chain():
    p = chain([1, 2, 3])
    fs = f_sets(p)
    assert len(fs) == 7  # frozen from tests/oracles/oracle_posets.py
    assert frozenset() in fs and frozenset({1, 2, 3}) in fs
    assert frozenset({1, 3}) not in fs


def test_f_sets_discrete():
    assert len(f_sets(discrete(range(4)))) == 2 ** 4


def test_g_and_h_pairs_chain2():
    p = chain([1, 2])
    F = frozenset
    # frozen from tests/oracles/oracle_posets.py (labels 0,1 -> 1,2)
    assert set(g_pairs(p)) == {
        (F(), F()), (F(), F({1})), (F(), F({1, 2})), (F(), F({2})),
        (F({1}), F({1})), (F({1}), F({1, 2})),
        (F({1, 2}), F({1, 2})), (F({2}), F({2}))}
    assert set(h_pairs(p)) == {
        (F(), F()), (F({1}), F()), (F({1}), F({1})),
        (F({1, 2}), F()), (F({1, 2}), F({1, 2})), (F({1, 2}), F({2})),
        (F({2}), F()), (F({2}), F({2}))}


def test_every_f_set_self_pairs(small_posets):
    for p in small_posets[3]:
        for J in f_sets(p):
            assert (J, J) in set(g_pairs(p))
            assert (J, J) in set(h_pairs(p))


def test_dominates_examples():
    d2, t2 = discrete([1, 2]), chain([1, 2])
    assert dominates(d2, d2) == 0
    assert dominates(t2, d2) == 1
    assert dominates(chain([1, 2, 3]), discrete([1, 2, 3])) == 3
    assert dominates(d2, t2) is None
    with pytest.raises(InputError):
        dominates(d2, discrete([3, 4]))


def test_dominated_pair_counts(small_posets):
    n3 = sum(1 for c in small_posets[3] for f in small_posets[3]
             if dominates(c, f) is not None)
    assert n3 == DOMINATED_PAIRS_ON_3
    n4 = sum(1 for c in small_posets[4] for f in small_posets[4]
             if dominates(c, f) is not None)
    assert n4 == DOMINATED_PAIRS_ON_4


def test_domination_is_partial_order(small_posets):
    ps = small_posets[3]
    for a in ps:
        assert dominates(a, a) == 0
    for a in ps:
        for b in ps:
            if a is b:
                continue
            if dominates(a, b) is not None and dominates(b, a) is not None:
                pytest.fail("antisymmetry of domination broken")
    # transitivity, with step counts adding up
    for a in ps:
        for b in ps:
            sab = dominates(a, b)
            if sab is None:
                continue
            for c in ps:
                sbc = dominates(b, c)
                if sbc is None:
                    continue
                assert dominates(a, c) == sab + sbc


def test_every_order_dominated_by_some_total(small_posets):
    for n in (1, 2, 3, 4):
        totals = [t for t in small_posets[n] if t.is_total()]
        for p in small_posets[n]:
            assert any(dominates(t, p) is not None for t in totals)


def test_connected_components():
    assert connected_components(discrete(range(3))) == [
        frozenset({0}), frozenset({1}), frozenset({2})]
    assert connected_components(chain(range(4))) == [frozenset(range(4))]
    p = FinitePoset([1, 2, 3, 4], pairs=[(1, 2), (3, 4)])
    assert connected_components(p) == [frozenset({1, 2}), frozenset({3, 4})]


def test_lower_sets():
    assert len(chain(range(5)).lower_sets) == 6
    assert len(discrete(range(4)).lower_sets) == 16
    p = FinitePoset("abc", pairs=[("a", "b")])
    assert set(p.lower_sets) <= set(p.f_sets)


def test_covers():
    assert chain([1, 2, 3]).covers == [(1, 2), (2, 3)]
    assert discrete([1, 2]).covers == []


def test_restrict_and_relabel():
    p = FinitePoset([1, 2, 3], pairs=[(1, 2), (2, 3)])
    q = p.restrict({1, 3})
    assert q.labels == (1, 3) and q.lt(1, 3)
    r = p.relabel({1: "x", 2: "y", 3: "z"})
    assert r.lt("x", "z")
    assert r.canonical_key == p.canonical_key


def test_orders_between_chain3():
    d, t = discrete([1, 2, 3]), chain([1, 2, 3])
    between = orders_between(d, t)
    # subsets of the 3 chain relations that stay transitive: all but one
    assert len(between) == 7
    assert all(dominates(t, q) is not None for q in between)
    assert orders_dominated_by(t) == between
    with pytest.raises(InputError):
        orders_between(t, d)


def test_canonical_key_counts_iso_classes(small_posets):
    for n in (1, 2, 3, 4):
        keys = {p.canonical_key for p in small_posets[n]}
        assert len(keys) == UNLABELED_COUNTS[n]


@st.composite
def poset_and_permutation(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    all_ps = _POSETS_BY_N[n]
    p = all_ps[draw(st.integers(min_value=0, max_value=len(all_ps) - 1))]
    perm = draw(st.permutations(list(range(1, n + 1))))
    return p, perm


_POSETS_BY_N = {n: list(enumerate_partial_orders(range(1, n + 1)))
                for n in (1, 2, 3, 4)}


@settings(max_examples=120, deadline=None)
@given(poset_and_permutation())
def test_canonical_key_is_relabeling_invariant(pp):
    p, perm = pp
    mapping = dict(zip(range(1, p.n + 1), perm))
    q = FinitePoset(
        sorted(mapping.values()),
        pairs=[(mapping[a], mapping[b]) for (a, b) in p.strict_pairs])
    assert q.canonical_key == p.canonical_key


@settings(max_examples=80, deadline=None)
@given(poset_and_permutation())
def test_lower_sets_are_convex_and_closed(pp):
    p, _ = pp
    fs = set(f_sets(p))
    for S in p.lower_sets:
        assert S in fs
        assert p.down_closure(S) == S
    # g-pair inner members of the whole set are exactly the lower sets
    lows = {J for (J, K) in g_pairs(p) if K == frozenset(p.labels)}
    assert lows == set(p.lower_sets)
