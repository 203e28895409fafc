"""Exhaustive field-axiom and linear-algebra tests for repconf.gf."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from repconf.errors import InputError
from repconf.gf import (
    all_subspaces, annihilator, complete_basis, coords, enumerate_matrices,
    enumerate_subspaces, enumerate_vectors, express_in_rows, field, gl_order,
    identity_matrix, in_span, left_kernel, mat_inverse, mat_mul, mat_vec,
    q_binomial, rank, rref, span, sub_contains, sub_intersect, sub_sum,
    transpose,
)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_field_axioms_exhaustive(q):
    F = field(q)
    els = F.elements
    for a in els:
        assert F.add(a, 0) == a and F.mul(a, 1) == a and F.mul(a, 0) == 0
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    for a in els:
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
            for c in els:
                assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b),
                                                      F.mul(a, c))


@pytest.mark.parametrize("q", [4, 8, 9])
def test_prime_power_fields_have_prime_subfield(q):
    F = field(q)
    # characteristic: adding 1 to itself p times gives 0
    acc, steps = 1, 1
    while acc != 0:
        acc = F.add(acc, 1)
        steps += 1
    assert steps == F.p


def test_unsupported_field_size():
    with pytest.raises(InputError):
        field(6)
    with pytest.raises(InputError):
        field(16)


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        field(5).inv(0)


def test_rref_canonical_and_idempotent():
    F = field(3)
    M = ((1, 2, 0), (2, 1, 1), (0, 0, 1))
    R, piv = rref(F, M)
    assert rref(F, R)[0] == R
    # row space is preserved
    assert all(in_span(F, R, row) for row in M)
    assert all(in_span(F, M and rref(F, M)[0], row) for row in R)


@pytest.mark.parametrize("q", [2, 3])
def test_rank_matches_rowspace_size(q):
    """Over tiny fields, q^rank must equal the number of vectors in the row
    space, counted by brute force."""
    F = field(q)
    for M in itertools.islice(enumerate_matrices(F, 2, 3), 0, None, 7):
        r = rank(F, M)
        spanned = {mat_vec(F, c, M) for c in enumerate_vectors(F, 2)}
        assert len(spanned) == q ** r


def test_left_kernel_is_exact():
    F = field(5)
    M = ((1, 2), (2, 4), (0, 1))
    K = left_kernel(F, M)
    for v in K:
        assert mat_vec(F, v, M) == (0, 0)
    # dimension check: rank + kernel dim = number of rows
    assert len(K) + rank(F, M) == 3
    # every brute-force kernel vector lies in the computed span
    for v in enumerate_vectors(F, 3):
        if mat_vec(F, v, M) == (0, 0):
            assert in_span(F, K, v)


def test_express_and_coords():
    F = field(7)
    rows = ((1, 2, 3), (0, 1, 4))
    v = mat_vec(F, (2, 1), rows)
    x = express_in_rows(F, rows, v)
    assert x is not None and mat_vec(F, x, rows) == v
    # (1,0,0) is outside: the rref of `rows` is (1,0,2),(0,1,4)
    assert express_in_rows(F, rows, (1, 0, 0)) is None
    with pytest.raises(InputError):
        coords(F, ((1, 0),), (0, 1))


def test_mat_inverse():
    F = field(3)
    M = ((1, 2), (1, 1))
    Minv = mat_inverse(F, M)
    assert mat_mul(F, M, Minv) == identity_matrix(2)
    assert mat_inverse(F, ((1, 2), (2, 1))) is None  # singular over F_3


def test_subspace_counts_gaussian():
    F2 = field(2)
    per_dim = [sum(1 for _ in enumerate_subspaces(F2, 4, k))
               for k in range(5)]
    assert per_dim == [1, 15, 35, 15, 1]
    assert per_dim[2] == q_binomial(4, 2, 2)
    F3 = field(3)
    assert [sum(1 for _ in enumerate_subspaces(F3, 3, k))
            for k in range(4)] == [1, 13, 13, 1]


def test_subspaces_are_canonical_and_distinct():
    F = field(2)
    subs = list(all_subspaces(F, 3))
    assert len(subs) == len(set(subs))
    for U in subs:
        assert rref(F, U, ncols=3)[0] == U


def test_sum_intersect_dimension_formula():
    F = field(3)
    subs = list(all_subspaces(F, 3))
    for U in subs[::5]:
        for V in subs[::7]:
            S = sub_sum(F, U, V, n=3)
            I = sub_intersect(F, U, V, 3)
            assert len(S) + len(I) == len(U) + len(V)
            assert sub_contains(F, S, U) and sub_contains(F, S, V)
            assert sub_contains(F, U, I) and sub_contains(F, V, I)


def test_intersect_by_brute_force():
    F = field(2)
    subs = list(all_subspaces(F, 3))
    for U in subs[::3]:
        for V in subs[::4]:
            I = sub_intersect(F, U, V, 3)
            got = {v for v in enumerate_vectors(F, 3)
                   if in_span(F, U, v) and in_span(F, V, v)}
            assert got == {v for v in enumerate_vectors(F, 3)
                           if in_span(F, I, v)}


def test_annihilator_involution():
    F = field(5)
    U = span(F, ((1, 2, 3), (0, 1, 1)))
    assert annihilator(F, annihilator(F, U, 3), 3) == U


def test_complete_basis_and_coords_roundtrip():
    F = field(4)
    inner = span(F, ((1, 0, 0),))
    outer = span(F, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    extra = complete_basis(F, inner, outer)
    assert len(extra) == 2
    full = inner + extra
    for v in [(1, 2, 3), (0, 1, 1)]:
        assert mat_vec(F, coords(F, full, v), full) == v
    with pytest.raises(InputError):
        complete_basis(F, outer, inner)


def test_gl_order():
    assert gl_order(2, 2) == 6
    assert gl_order(3, 2) == 48
    assert gl_order(2, 3) == 168
    # brute force cross-check over F_2, 2x2
    F = field(2)
    invertible = [M for M in enumerate_matrices(F, 2, 2)
                  if mat_inverse(F, M) is not None]
    assert len(invertible) == 6


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=6),
       st.data())
def test_transpose_involution_and_mat_vec_consistency(seed, data):
    q = [2, 3, 4, 5, 7, 8, 9][seed]
    F = field(q)
    rows = data.draw(st.integers(min_value=1, max_value=3))
    cols = data.draw(st.integers(min_value=1, max_value=3))
    M = tuple(tuple(data.draw(st.integers(min_value=0, max_value=q - 1))
                    for _ in range(cols)) for _ in range(rows))
    assert transpose(transpose(M)) == M
    v = tuple(data.draw(st.integers(min_value=0, max_value=q - 1))
              for _ in range(rows))
    # v*M equals row-combination semantics
    acc = [0] * cols
    for c, row in zip(v, M):
        for j in range(cols):
            acc[j] = F.add(acc[j], F.mul(c, row[j]))
    assert mat_vec(F, v, M) == tuple(acc)
