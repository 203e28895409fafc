"""Exact counting polynomials in q and their value at 1.

The counting model: every family of objects this package enumerates has, for
each admissible field size q, an exact integer (or rational, after weighting)
point count.  When those counts agree with a single polynomial in q, the
number the geometric theory assigns to the family is that polynomial's value
at q = 1.  This module provides the polynomial type, exact interpolation
from samples with a mandatory held-out consistency witness, and the
chi-weighted pushforward built on top.

A count family that fails the held-out check raises
:class:`NonPolynomialCountError` -- by design this is loud, never a silent
extrapolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Tuple

from .classfn import IsoClassFunction
from .errors import NonPolynomialCountError, SizeBoundError
from .gf import SUPPORTED_Q

__all__ = [
    "CountingPolynomial", "DEFAULT_SAMPLES", "EXTENDED_SAMPLES",
    "interpolate", "GroupQuotientSpec", "chi_homogeneous",
    "PushforwardSpec", "cf_pushforward",
]

# smallest admissible field sizes; enumeration cost grows fast with q, so
# interpolation uses them smallest-first
DEFAULT_SAMPLES = (2, 3, 4, 5, 7, 8, 9)

# every supported field size; fine for counts given by cheap closed formulas
EXTENDED_SAMPLES = tuple(SUPPORTED_Q)


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class CountingPolynomial:
    """Exact polynomial in q: ``coeffs[i]`` is the coefficient of q^i.

    ``samples`` records the field sizes a fit used and ``heldout`` the extra
    (q, count) pair that validated it; both are empty for polynomials built
    symbolically by arithmetic.
    """

    coeffs: Tuple[Fraction, ...]
    samples: Tuple[int, ...] = ()
    heldout: Optional[Tuple[int, Fraction]] = None

    @staticmethod
    def from_coeffs(coeffs, samples=(), heldout=None):
        return CountingPolynomial(
            _trim(Fraction(c) for c in coeffs), tuple(samples), heldout)

    @staticmethod
    def constant(c):
        return CountingPolynomial.from_coeffs([Fraction(c)])

    @staticmethod
    def variable():
        return CountingPolynomial.from_coeffs([0, 1])

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __call__(self, x):
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def at_one(self):
        return self(1)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return CountingPolynomial.from_coeffs(
            [(self.coeffs[i] if i < len(self.coeffs) else 0)
             + (other.coeffs[i] if i < len(other.coeffs) else 0)
             for i in range(n)])

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return CountingPolynomial.from_coeffs([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return CountingPolynomial.from_coeffs([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return CountingPolynomial.from_coeffs(out)

    def __rmul__(self, other):
        return self * other

    def exact_div(self, other):
        """Polynomial quotient; a nonzero remainder is an error."""
        other = _as_poly(other)
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        d = len(other.coeffs) - 1
        lead = other.coeffs[-1]
        while len(rem) - 1 >= d and any(rem):
            if rem[-1] == 0:
                rem.pop()
                continue
            shift = len(rem) - 1 - d
            c = rem[-1] / lead
            quot[shift] = c
            for i, b in enumerate(other.coeffs):
                rem[shift + i] -= c * b
            rem.pop()
        if any(rem):
            raise NonPolynomialCountError(
                "polynomial division left remainder %r" % (_trim(rem),))
        return CountingPolynomial.from_coeffs(quot)

    def __repr__(self):
        if not self.coeffs:
            return "CountingPolynomial(0)"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append("%s*q" % c if c != 1 else "q")
            else:
                terms.append("%s*q^%d" % (c, i) if c != 1 else "q^%d" % i)
        return "CountingPolynomial(%s)" % " + ".join(terms)


def _as_poly(x):
    if isinstance(x, CountingPolynomial):
        return x
    return CountingPolynomial.constant(x)


def interpolate(count_fn: Callable[[int], object], degree_bound: int,
                samples=None) -> CountingPolynomial:
    """Fit the unique polynomial of degree <= degree_bound through the counts
    at the first degree_bound+1 sample field sizes, then verify it against
    one held-out extra sample.

    Counts must be exact (int/Fraction).  The verification failure raises
    :class:`NonPolynomialCountError` with the offending data.
    """
    samples = tuple(samples) if samples is not None else DEFAULT_SAMPLES
    need = degree_bound + 2
    if len(samples) < need:
        raise SizeBoundError(
            "degree bound %d needs %d sample field sizes, only %r available"
            % (degree_bound, need, samples))
    used = samples[:need]
    fit_qs, holdout_q = used[:-1], used[-1]
    values = {q: Fraction(count_fn(q)) for q in used}

    # Lagrange interpolation over the fit points, exact arithmetic
    coeffs = [Fraction(0)] * (degree_bound + 1)
    for qi in fit_qs:
        # basis polynomial through qi, zero at the other fit points
        basis = [Fraction(1)]
        denom = Fraction(1)
        for qj in fit_qs:
            if qj == qi:
                continue
            # multiply basis by (x - qj)
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= qj * basis[t + 1]
            denom *= Fraction(qi - qj)
        w = values[qi] / denom
        for t, b in enumerate(basis):
            coeffs[t] += w * b

    poly = CountingPolynomial(_trim(coeffs), used,
                              (holdout_q, values[holdout_q]))
    for q in fit_qs:
        assert poly(q) == values[q]
    predicted = poly(holdout_q)
    if predicted != values[holdout_q]:
        raise NonPolynomialCountError(
            "counts are not a degree-<=%d polynomial in q: fit %r over "
            "q=%r predicts %s at held-out q=%d but the count there is %s"
            % (degree_bound, poly.coeffs, fit_qs, predicted, holdout_q,
               values[holdout_q]))
    return poly


@dataclass(frozen=True)
class GroupQuotientSpec:
    """A connected-group quotient G/H described by the exact orders of its
    groups of F_q points, as callables of q."""

    group_order: Callable[[int], int]
    subgroup_order: Callable[[int], int]
    degree_bound: int
    samples: Optional[Tuple[int, ...]] = None


def chi_homogeneous(spec: GroupQuotientSpec) -> Fraction:
    """Euler number of G/H: interpolate |G(F_q)| / |H(F_q)| and evaluate at
    q = 1.  The pointwise ratio must be an integer (coset count)."""

    def ratio(q):
        g, h = spec.group_order(q), spec.subgroup_order(q)
        r = Fraction(g, h)
        if r.denominator != 1:
            raise NonPolynomialCountError(
                "subgroup order %s does not divide group order %s at q=%d"
                % (h, g, q))
        return r

    samples = spec.samples if spec.samples is not None else EXTENDED_SAMPLES
    return interpolate(ratio, spec.degree_bound, samples).at_one


@dataclass(frozen=True)
class PushforwardSpec:
    """How to push a class function forward: the target keys, the counting
    mode, and the interpolation parameters for euler mode."""

    targets: tuple
    mode: str = "euler"              # "euler" | "fixed-q"
    degree_bound: int = 0
    samples: Optional[Tuple[int, ...]] = None
    q: Optional[int] = None          # fixed-q mode only


def cf_pushforward(f, map_spec: PushforwardSpec, fibres) -> IsoClassFunction:
    """Chi-weighted pushforward of a class function.

    ``fibres(q, target_key)`` must yield ``(source_key, count)`` pairs: at
    field size q, ``count`` points of the fibre over ``target_key`` carry the
    class ``source_key``.  In euler mode the weighted totals are interpolated
    in q and evaluated at 1; in fixed-q mode they are reported at ``q``
    directly.
    """
    get = f if callable(f) else (
        lambda k, s=f: s.get(k, Fraction(0)) if hasattr(s, "get")
        else Fraction(0))

    def total_at(q, target):
        acc = Fraction(0)
        for src, count in fibres(q, target):
            v = get(src)
            if v:
                acc += Fraction(v) * count
        return acc

    out = {}
    for target in map_spec.targets:
        if map_spec.mode == "fixed-q":
            out[target] = total_at(map_spec.q, target)
        else:
            poly = interpolate(lambda q: total_at(q, target),
                               map_spec.degree_bound, map_spec.samples)
            out[target] = poly.at_one
    return IsoClassFunction(out)
