"""Signed chain-counting coefficient systems on finite orders.

Two families of integer coefficients drive the order-rewriting identities in
this package:

* ``n_coeff(fine, coarse)``: a signed count of strictly-increasing chains of
  partial orders from ``fine`` to ``coarse`` (relation containment, each step
  adding at least one pair); the chain of length m contributes (-1)^m.  Its
  defining property is an inversion: summed over all middle orders it
  collapses to an equality indicator (:func:`check_n_inversion`).

* ``big_n``/``big_n_rel``: a signed count of chains of *allowable set
  partitions* of the ground set, from the discrete partition up to the
  one-block partition (or to the fibre partition of a surjection).  A
  partition is allowable when collapsing each block to a point leaves no
  directed cycle among blocks, i.e. the collapse induces a genuine partial
  order downstairs.  These coefficients satisfy their own inversion
  (:func:`check_N_inversion`) and a product rule over fibres
  (:func:`check_N_product`).

Both families are computed by memoized first-step recursion:
``c(bottom, top) = -sum(c(mid, top))`` over all strictly bigger ``mid``,
with ``c(top, top) = 1``.  This is equivalent to, but much faster than, the
literal chain enumeration used by the oracle scripts in ``tests/oracles``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Callable, Mapping, Sequence, Union

from .errors import InputError
from .posets import FinitePoset, orders_between

__all__ = [
    "SurjectionData", "n_coeff", "check_n_inversion", "is_allowable",
    "induced_order", "big_n", "big_n_rel", "check_N_inversion",
    "check_N_product", "surjections", "set_partitions",
]


# --------------------------------------------------------------------------
# little n
# --------------------------------------------------------------------------

_N_PAIR_MEMO: dict = {}


def _pair_key(fine: FinitePoset, coarse: FinitePoset):
    """Canonical key of the ordered pair (fine, coarse) under simultaneous
    relabeling."""
    n = fine.n
    best = None
    for perm in itertools.permutations(range(n)):
        flat = tuple(
            (int(fine.mat[perm[i], perm[j]]) << 1)
            | int(coarse.mat[perm[i], perm[j]])
            for i in range(n) for j in range(n))
        if best is None or flat < best:
            best = flat
    return (n, best)


def n_coeff(fine: FinitePoset, coarse: FinitePoset) -> int:
    """Signed chain count between two orders on the same ground set.

    Raises :class:`InputError` unless ``coarse`` dominates ``fine``.
    """
    from .posets import dominates
    steps = dominates(coarse, fine)
    if steps is None:
        raise InputError("second order must dominate the first")
    if steps == 0:
        return 1
    key = _pair_key(fine, coarse)
    cached = _N_PAIR_MEMO.get(key)
    if cached is not None:
        return cached
    total = 0
    for mid in orders_between(fine, coarse):
        if mid.strict_pairs != fine.strict_pairs:
            total -= n_coeff(mid, coarse)
    _N_PAIR_MEMO[key] = total
    return total


def check_n_inversion(p: FinitePoset, coarse: FinitePoset) -> bool:
    """Summing the coefficient over every order between ``p`` and ``coarse``
    must give 1 when the two orders coincide and 0 otherwise -- in both the
    (mid, coarse) and the (p, mid) positions."""
    mids = orders_between(p, coarse)
    want = 1 if p.strict_pairs == coarse.strict_pairs else 0
    upper = sum(n_coeff(mid, coarse) for mid in mids)
    lower = sum(n_coeff(p, mid) for mid in mids)
    return upper == want and lower == want


# --------------------------------------------------------------------------
# surjections and partitions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SurjectionData:
    """A surjection from the ground set of a finite poset onto a label set.

    ``phi`` may be given as a mapping, a callable, or a sequence aligned with
    ``source.labels``; it is normalized to an aligned tuple.  Surjectivity is
    enforced at construction.
    """

    source: FinitePoset
    target_labels: tuple
    phi_values: tuple = field(init=False)
    phi: Union[Mapping, Callable, Sequence] = ()

    def __init__(self, source, target_labels, phi):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target_labels", tuple(target_labels))
        if len(set(self.target_labels)) != len(self.target_labels):
            raise InputError("duplicate target labels: %r"
                             % (self.target_labels,))
        if isinstance(phi, Mapping):
            values = tuple(phi[a] for a in source.labels)
        elif callable(phi):
            values = tuple(phi(a) for a in source.labels)
        else:
            values = tuple(phi)
            if len(values) != source.n:
                raise InputError("phi sequence length %d does not match %d "
                                 "source labels" % (len(values), source.n))
        object.__setattr__(self, "phi_values", values)
        object.__setattr__(self, "phi", None)
        tset = set(self.target_labels)
        if not set(values) <= tset:
            raise InputError("phi hits labels outside the target")
        if set(values) != tset:
            raise InputError("phi is not surjective onto %r"
                             % (self.target_labels,))

    def __eq__(self, other):
        if not isinstance(other, SurjectionData):
            return NotImplemented
        return (self.source == other.source
                and self.target_labels == other.target_labels
                and self.phi_values == other.phi_values)

    def __hash__(self):
        return hash((self.source, self.target_labels, self.phi_values))

    def __call__(self, a):
        return self.phi_values[self.source.index(a)]

    def fibre(self, k):
        return frozenset(a for a, v in zip(self.source.labels,
                                           self.phi_values) if v == k)

    def fibres(self):
        return tuple(self.fibre(k) for k in self.target_labels)

    def is_bijective(self):
        return self.source.n == len(self.target_labels)

    @cached_property
    def _closure_pairs(self):
        """Transitive closure on the target of the pushed-down relation."""
        edges = {(self(a), self(b)) for (a, b) in self.source.strict_pairs
                 if self(a) != self(b)}
        changed = True
        while changed:
            changed = False
            for (a, b) in list(edges):
                for (c, d) in list(edges):
                    if b == c and (a, d) not in edges:
                        edges.add((a, d))
                        changed = True
        return frozenset(edges)

    @cached_property
    def allowable(self) -> bool:
        """True when some order on the target makes phi monotone, i.e. the
        pushed-down relation closes up without directed cycles."""
        return not any((b, a) in self._closure_pairs
                       for (a, b) in self._closure_pairs)

    def induced_order(self) -> FinitePoset:
        """The smallest order on the target making phi monotone."""
        if not self.allowable:
            raise InputError("surjection admits no compatible target order")
        return FinitePoset(self.target_labels, pairs=self._closure_pairs)


def is_allowable(s: SurjectionData) -> bool:
    return s.allowable


def induced_order(s: SurjectionData) -> FinitePoset:
    return s.induced_order()


def surjections(source_labels, target_labels):
    """All surjections as label dicts, in a deterministic order."""
    source_labels = tuple(source_labels)
    target_labels = tuple(target_labels)
    out = []
    for values in itertools.product(target_labels, repeat=len(source_labels)):
        if set(values) == set(target_labels):
            out.append(dict(zip(source_labels, values)))
    return out


def set_partitions(labels):
    """All set partitions as tuples of frozensets, deterministically ordered
    (each block and the block list sorted by first appearance)."""
    labels = tuple(labels)

    def rec(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in rec(rest):
            for i in range(len(part)):
                yield part[:i] + [part[i] | {first}] + part[i + 1:]
            yield [frozenset({first})] + part

    pos = {a: i for i, a in enumerate(labels)}

    def key(block):
        return min(pos[a] for a in block)

    out = [tuple(sorted(blocks, key=key)) for blocks in rec(list(labels))]
    out.sort(key=lambda blocks: (len(blocks),
                                 tuple(tuple(sorted(b, key=pos.get))
                                       for b in blocks)))
    return out


# --------------------------------------------------------------------------
# big N
# --------------------------------------------------------------------------

_ALLOWABLE_MEMO: dict = {}
_BIG_N_MEMO: dict = {}


def _poset_exact_key(p: FinitePoset):
    return (p.labels, p.mat.tobytes())


def _allowable_partitions(p: FinitePoset):
    """Partitions of the ground set whose block collapse is allowable,
    as frozensets-of-frozensets."""
    key = _poset_exact_key(p)
    cached = _ALLOWABLE_MEMO.get(key)
    if cached is not None:
        return cached
    found = []
    for blocks in set_partitions(p.labels):
        block_of = {a: i for i, blk in enumerate(blocks) for a in blk}
        s = SurjectionData(p, range(len(blocks)), block_of)
        if s.allowable:
            found.append(frozenset(blocks))
    _ALLOWABLE_MEMO[key] = found
    return found


def _refines(p1, p2):
    return all(any(b1 <= b2 for b2 in p2) for b1 in p1)


def _signed_partition_chains(p: FinitePoset, top):
    """Sum of (-1)^m over chains of allowable partitions from the discrete
    partition to ``top``, by memoized first-step recursion."""
    allowable = _allowable_partitions(p)
    if top not in allowable:
        raise InputError("target partition is not allowable")
    below_top = [q for q in allowable if _refines(q, top)]
    diag = frozenset(frozenset({a}) for a in p.labels)
    memo = {}

    def from_here(cur):
        if cur == top:
            return 1
        got = memo.get(cur)
        if got is not None:
            return got
        total = 0
        for nxt in below_top:
            if nxt != cur and _refines(cur, nxt):
                total -= from_here(nxt)
        memo[cur] = total
        return total

    return from_here(diag)


def big_n(p: FinitePoset) -> int:
    """Signed allowable-partition chain count up to the one-block partition."""
    key = ("abs", p.canonical_key)
    cached = _BIG_N_MEMO.get(key)
    if cached is None:
        cached = _signed_partition_chains(
            p, frozenset({frozenset(p.labels)}) if p.n else frozenset())
        _BIG_N_MEMO[key] = cached
    return cached


def big_n_rel(s: SurjectionData) -> int:
    """Signed allowable-partition chain count up to the fibre partition of an
    allowable surjection."""
    if not s.allowable:
        raise InputError("surjection is not allowable")
    key = ("rel", _poset_exact_key(s.source), s.phi_values)
    cached = _BIG_N_MEMO.get(key)
    if cached is None:
        top = frozenset(s.fibres())
        cached = _signed_partition_chains(s.source, top)
        _BIG_N_MEMO[key] = cached
    return cached


def check_N_inversion(s: SurjectionData) -> bool:
    """Double-sum inversion: over middle sets of every size and over
    factorizations phi = xi o psi with psi allowable, the coefficients
    ``big_n_rel`` sum (with 1/|middle|! weights) to 1 exactly when phi is
    bijective -- in two variants, weighting by the source-side or by the
    middle-side coefficient."""
    if not s.allowable:
        raise InputError("surjection is not allowable")
    I = s.source
    total_src = Fraction(0)
    total_mid = Fraction(0)
    for m in range(1, I.n + 1):
        weight = Fraction(1, factorial(m))
        mid_labels = tuple(range(m))
        for psi_map in surjections(I.labels, mid_labels):
            psi = SurjectionData(I, mid_labels, psi_map)
            if not psi.allowable:
                continue
            # xi with xi o psi = phi exists iff phi is constant on psi-fibres
            xi_map = {}
            for a in I.labels:
                b = psi_map[a]
                if b in xi_map and xi_map[b] != s(a):
                    xi_map = None
                    break
                xi_map[b] = s(a)
            if xi_map is None:
                continue
            total_src += weight * big_n_rel(psi)
            mid_poset = psi.induced_order()
            xi = SurjectionData(mid_poset, s.target_labels, xi_map)
            total_mid += weight * big_n_rel(xi)
    want = Fraction(1 if s.is_bijective() else 0)
    return total_src == want and total_mid == want


def check_N_product(s: SurjectionData) -> bool:
    """The relative coefficient factors over the fibres of the surjection."""
    if not s.allowable:
        raise InputError("surjection is not allowable")
    prod = 1
    for part in s.fibres():
        prod *= big_n(s.source.restrict(part))
    return big_n_rel(s) == prod
