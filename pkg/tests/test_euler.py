"""Tests for exact interpolation and the q -> 1 specialization."""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest

from repconf.classfn import IsoClassFunction
from repconf.errors import NonPolynomialCountError, SizeBoundError
from repconf.euler import (
    CountingPolynomial, GroupQuotientSpec, PushforwardSpec, cf_pushforward,
    chi_homogeneous, interpolate,
)
from repconf.gf import (
    all_subspaces, enumerate_subspaces, enumerate_vectors, field, gl_order,
    in_span,
)


def test_point_count_of_affine_space_is_one():
    for m in range(5):
        assert interpolate(lambda q, m=m: q ** m, m).at_one == 1


def test_point_count_of_projective_space():
    for m in range(1, 5):
        poly = interpolate(
            lambda q, m=m: sum(q ** i for i in range(m + 1)), m)
        assert poly.at_one == m + 1


def test_gl2_mod_torus_equals_two():
    poly = interpolate(lambda q: gl_order(q, 2) // (q - 1) ** 2, 2)
    assert poly.at_one == 2


def test_interpolate_is_exact_at_samples():
    poly = interpolate(lambda q: 3 * q ** 2 - q + 5, 2)
    for q in poly.samples:
        assert poly(q) == 3 * q ** 2 - q + 5


def test_heldout_mismatch_is_loud():
    # q^3 is not a polynomial of degree <= 2: the held-out sample catches it
    with pytest.raises(NonPolynomialCountError):
        interpolate(lambda q: q ** 3, 2)


def test_insufficient_samples():
    with pytest.raises(SizeBoundError):
        interpolate(lambda q: q, 1, samples=(2, 3))


def test_polynomial_arithmetic():
    x = CountingPolynomial.variable()
    p = (x + 1) * (x - 1)
    assert p.coeffs == (Fraction(-1), Fraction(0), Fraction(1))
    assert p(3) == 8
    q = p.exact_div(x - 1)
    assert q.coeffs == (Fraction(1), Fraction(1))
    with pytest.raises(NonPolynomialCountError):
        (x * x + 1).exact_div(x - 1)
    assert (x - x).coeffs == ()
    assert (2 * x + x * 0 + 5)(1) == 7


def test_chi_homogeneous_trivial_and_torus():
    same = GroupQuotientSpec(lambda q: gl_order(q, 3),
                             lambda q: gl_order(q, 3), degree_bound=0)
    assert chi_homogeneous(same) == 1
    for m in range(1, 5):
        spec = GroupQuotientSpec(
            lambda q, m=m: gl_order(q, m),
            lambda q, m=m: (q - 1) ** m,
            degree_bound=m * m - m)
        assert chi_homogeneous(spec) == factorial(m)


def test_chi_homogeneous_end_units_of_square():
    # automorphisms of a double simple summand modulo the per-summand part
    spec = GroupQuotientSpec(lambda q: gl_order(q, 2),
                             lambda q: (q - 1) ** 2, degree_bound=2)
    assert chi_homogeneous(spec) == 2


def test_chi_homogeneous_divisibility_guard():
    bad = GroupQuotientSpec(lambda q: q, lambda q: q + 1, degree_bound=1)
    with pytest.raises(NonPolynomialCountError):
        chi_homogeneous(bad)


def test_cf_pushforward_identity_and_zero():
    f = IsoClassFunction({"a": Fraction(2), "b": Fraction(-1)})
    spec = PushforwardSpec(targets=("a", "b"), degree_bound=0)
    ident = cf_pushforward(f, spec, lambda q, t: [(t, 1)])
    assert ident == f
    zero = cf_pushforward(IsoClassFunction(), spec, lambda q, t: [(t, 1)])
    assert zero.is_zero()


def test_cf_pushforward_collapses_projective_line():
    # one target point; the fibre is the set of lines in F_q^2
    f = IsoClassFunction({"line": Fraction(1)})
    spec = PushforwardSpec(targets=("pt",), degree_bound=1)
    out = cf_pushforward(
        f, spec, lambda q, t: [("line", q + 1)])
    assert out("pt") == 2


def test_pushforward_functoriality_on_flag_geometry():
    """Composite of pushforwards equals pushforward of composite: pairs
    (vector v on a line L) -> lines L -> point, with real enumeration."""

    def pairs_over_line(q, line_key):
        F = field(q)
        # line_key is the rref basis of the line; count vectors on it
        count = sum(1 for v in enumerate_vectors(F, 2)
                    if in_span(F, line_key, v))
        return [("pair", count)]

    def lines(q):
        return [L for L in enumerate_subspaces(field(q), 2, 1)]

    # inner push: over each line (at fixed q) count its q vectors; the
    # line-level function must then sum to (q+1)*q over the point
    f = IsoClassFunction({"pair": Fraction(1)})

    def composite_fibre(q, t):
        total = 0
        for L in lines(q):
            for key, c in pairs_over_line(q, L):
                total += c
        return [("pair", total)]

    spec_pt = PushforwardSpec(targets=("pt",), degree_bound=2)
    via_composite = cf_pushforward(f, spec_pt, composite_fibre)

    # two-step: interpolate per-line totals is impossible (lines vary with
    # q), so push to a line-count profile first: all lines carry the same
    # count, giving the intermediate function value q at a single key
    def two_step_fibre(q, t):
        per_line = [sum(c for _, c in pairs_over_line(q, L))
                    for L in lines(q)]
        assert len(set(per_line)) == 1  # homogeneous over the base
        return [("pair", per_line[0] * len(per_line))]

    via_two_step = cf_pushforward(f, spec_pt, two_step_fibre)
    assert via_composite == via_two_step
    assert via_composite("pt") == 2  # chi of (affine line) x (proj line)


def test_pushforward_cartesian_square():
    """Pull back then push equals push then pull back, on the square of
    nonzero vectors over lines: X = nonzero vectors of F_q^2, Z = lines,
    Y = {(line, index in {0,1})} a trivial double cover of Z, W = X x_Z Y."""

    def count_vectors_on(q, L):
        F = field(q)
        return sum(1 for v in enumerate_vectors(F, 2)
                   if any(v) and in_span(F, L, v))

    # CF along X -> Z of the constant 1: value q-1 at each line; pulled back
    # to Y it is q-1 at each (line, i).  Pushing the pullback along
    # W -> Y gives the same because W over (L, i) is exactly the fibre of X
    # over L.  Compare the two as interpolated totals over all of Y.
    def push_then_pull_total(q):
        F = field(q)
        return sum(count_vectors_on(q, L) * 1
                   for L in enumerate_subspaces(F, 2, 1) for _ in (0, 1))

    def pull_then_push_total(q):
        F = field(q)
        total = 0
        for L in enumerate_subspaces(F, 2, 1):
            for _ in (0, 1):
                total += count_vectors_on(q, L)
        return total

    a = interpolate(push_then_pull_total, 2)
    b = interpolate(pull_then_push_total, 2)
    assert a.coeffs == b.coeffs
    # and the common value is chi = 2 lines x 2 sheets x chi(punctured line)=0
    assert a.at_one == 0


def test_all_subspaces_counts_interpolate():
    # the number of all subspaces of F_q^3 is 2 + 2(q^2+q+1): chi = 8
    poly = interpolate(
        lambda q: sum(1 for _ in all_subspaces(field(q), 3)), 2,
        samples=(2, 3, 4, 5))
    assert poly.at_one == 8
