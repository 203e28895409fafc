"""Finite partial orders and the subset structure built on them.

Ground sets are ordered label sequences (labels may be ints, strings, ...).
The order relation is stored as a dense boolean matrix ``mat`` with
``mat[i, j]`` meaning ``labels[i] <= labels[j]``.  Instances are immutable
value objects: equal labels + equal matrix means equal poset.

Terminology used throughout the package:

* an *f-set* is an order-convex subset ``J``: whenever ``h, j`` lie in ``J``
  and ``h <= i <= j``, then ``i`` lies in ``J``;
* ``(J, K)`` is a *g-pair* if ``J`` is a subset of ``K`` closed from below
  inside ``K`` (``j in J``, ``k in K``, ``k <= j`` force ``k in J``);
* ``(J, K)`` is an *h-pair* if ``K`` is a subset of ``J`` closed from above
  inside ``J`` (``j in J``, ``k in K``, ``k <= j`` force ``j in K``);
* an order *dominates* another (on the same ground set) if it contains every
  relation of the other; the *step count* is the number of strict pairs
  gained.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from .errors import InputError, SizeBoundError

__all__ = [
    "FinitePoset", "enumerate_partial_orders", "dominates", "f_sets",
    "g_pairs", "h_pairs", "connected_components", "orders_dominated_by",
    "orders_between", "chain", "discrete",
]


class FinitePoset:
    """A partial order on a finite labeled ground set.

    ``pairs`` are generating relations ``(a, b)`` meaning ``a <= b``; the
    constructor takes their reflexive-transitive closure and rejects the
    result if antisymmetry fails.
    """

    def __init__(self, labels, pairs=(), matrix=None):
        self.labels = tuple(labels)
        n = len(self.labels)
        self._index = {a: i for i, a in enumerate(self.labels)}
        if len(self._index) != n:
            raise InputError("duplicate labels: %r" % (self.labels,))
        if matrix is not None:
            mat = np.array(matrix, dtype=bool)
            if mat.shape != (n, n):
                raise InputError("matrix shape %r does not fit %d labels"
                                 % (mat.shape, n))
        else:
            mat = np.eye(n, dtype=bool)
            for a, b in pairs:
                if a not in self._index or b not in self._index:
                    raise InputError("relation pair (%r, %r) uses unknown "
                                     "labels" % (a, b))
                mat[self._index[a], self._index[b]] = True
        if n:
            np.fill_diagonal(mat, True)
        for k in range(n):
            mat |= np.outer(mat[:, k], mat[k, :])
        sym = mat & mat.T & ~np.eye(n, dtype=bool)
        if sym.any():
            i, j = np.argwhere(sym)[0]
            raise InputError(
                "not antisymmetric after closure: %r <= %r <= %r"
                % (self.labels[i], self.labels[j], self.labels[i]))
        mat.setflags(write=False)
        self.mat = mat

    # -- basic protocol ----------------------------------------------------

    @property
    def n(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.mat,
                                                              other.mat)

    def __hash__(self):
        return hash((self.labels, self.mat.tobytes()))

    def __repr__(self):
        return "FinitePoset(%r, %r)" % (list(self.labels), self.pair_list())

    def index(self, a):
        try:
            return self._index[a]
        except KeyError:
            raise InputError("label %r not in ground set %r"
                             % (a, self.labels)) from None

    def leq(self, a, b):
        return bool(self.mat[self.index(a), self.index(b)])

    def lt(self, a, b):
        return a != b and self.leq(a, b)

    @cached_property
    def strict_pairs(self):
        """Frozenset of label pairs (a, b) with a < b strictly."""
        return frozenset(
            (self.labels[i], self.labels[j])
            for i in range(self.n) for j in range(self.n)
            if i != j and self.mat[i, j])

    def pair_list(self):
        """Strict pairs as a deterministically ordered list (by position)."""
        return sorted(
            ((a, b) for (a, b) in self.strict_pairs),
            key=lambda p: (self._index[p[0]], self._index[p[1]]))

    def is_total(self):
        return len(self.strict_pairs) == self.n * (self.n - 1) // 2

    def is_discrete(self):
        return not self.strict_pairs

    # -- subset machinery --------------------------------------------------

    def _subset_key(self, S):
        return (len(S), tuple(sorted(self._index[a] for a in S)))

    def sort_subsets(self, subsets):
        return sorted(subsets, key=self._subset_key)

    def down_set(self, a):
        """All b with b <= a (the principal lower set of a)."""
        i = self.index(a)
        return frozenset(self.labels[j] for j in np.flatnonzero(self.mat[:, i]))

    def up_set(self, a):
        i = self.index(a)
        return frozenset(self.labels[j] for j in np.flatnonzero(self.mat[i, :]))

    def down_closure(self, S):
        out = set()
        for a in S:
            out |= self.down_set(a)
        return frozenset(out)

    def is_lower_set(self, S):
        S = frozenset(S)
        return self.down_closure(S) == S

    @cached_property
    def lower_sets(self):
        """All down-closed subsets, deterministically ordered."""
        found = []
        for r in range(self.n + 1):
            for combo in itertools.combinations(self.labels, r):
                S = frozenset(combo)
                if self.is_lower_set(S):
                    found.append(S)
        return self.sort_subsets(found)

    def _is_convex(self, S):
        for a in S:
            ia = self.index(a)
            for b in S:
                ib = self.index(b)
                between = self.mat[ia, :] & self.mat[:, ib]
                for k in np.flatnonzero(between):
                    if self.labels[k] not in S:
                        return False
        return True

    @cached_property
    def f_sets(self):
        """All order-convex subsets, including the empty set and the whole
        ground set, deterministically ordered."""
        found = []
        for r in range(self.n + 1):
            for combo in itertools.combinations(self.labels, r):
                S = frozenset(combo)
                if self._is_convex(S):
                    found.append(S)
        return self.sort_subsets(found)

    def is_g_pair(self, J, K):
        """J inside K, closed from below within K."""
        J, K = frozenset(J), frozenset(K)
        if not J <= K:
            return False
        return all(not self.leq(k, j) or k in J for j in J for k in K)

    def is_h_pair(self, J, K):
        """K inside J, closed from above within J."""
        J, K = frozenset(J), frozenset(K)
        if not K <= J:
            return False
        return all(not self.leq(k, j) or j in K for j in J for k in K)

    @cached_property
    def g_pairs(self):
        out = [(J, K) for J in self.f_sets for K in self.f_sets
               if self.is_g_pair(J, K)]
        return sorted(out, key=lambda p: (self._subset_key(p[0]),
                                          self._subset_key(p[1])))

    @cached_property
    def h_pairs(self):
        out = [(J, K) for J in self.f_sets for K in self.f_sets
               if self.is_h_pair(J, K)]
        return sorted(out, key=lambda p: (self._subset_key(p[0]),
                                          self._subset_key(p[1])))

    @cached_property
    def covers(self):
        """Covering relations: pairs (a, b) with a < b and nothing strictly
        between."""
        out = []
        for a in self.labels:
            for b in self.labels:
                if not self.lt(a, b):
                    continue
                if any(self.lt(a, c) and self.lt(c, b) for c in self.labels):
                    continue
                out.append((a, b))
        return sorted(out, key=lambda p: (self._index[p[0]],
                                          self._index[p[1]]))

    @cached_property
    def components(self):
        """Partition of the ground set under the equivalence generated by
        comparability."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comparable = self.mat | self.mat.T
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if comparable[i, j]:
                    parent[find(i)] = find(j)
        buckets = {}
        for i in range(self.n):
            buckets.setdefault(find(i), []).append(self.labels[i])
        parts = [frozenset(v) for v in buckets.values()]
        return self.sort_subsets(parts)

    # -- derived posets ----------------------------------------------------

    def restrict(self, S):
        """Induced order on a subset, label order preserved."""
        S = frozenset(S)
        keep = [i for i, a in enumerate(self.labels) if a in S]
        if len(keep) != len(S):
            raise InputError("restriction set %r is not included in the "
                             "ground set" % (sorted(map(repr, S)),))
        sub = self.mat[np.ix_(keep, keep)]
        return FinitePoset([self.labels[i] for i in keep], matrix=sub)

    def relabel(self, mapping):
        """Replace each label a by mapping[a]; relation matrix unchanged."""
        return FinitePoset([mapping[a] for a in self.labels],
                           matrix=self.mat)

    def with_pairs(self, extra):
        """New poset on the same labels with extra generating relations."""
        return FinitePoset(self.labels,
                           pairs=list(self.strict_pairs) + list(extra))

    @cached_property
    def canonical_key(self):
        """Lexicographically minimal row-major relation matrix over all
        relabelings; equal keys mean isomorphic posets."""
        n = self.n
        best = None
        for perm in itertools.permutations(range(n)):
            flat = tuple(
                int(self.mat[perm[i], perm[j]])
                for i in range(n) for j in range(n))
            if best is None or flat < best:
                best = flat
        return (n, best)


def chain(labels):
    """Total order in the given label sequence order."""
    labels = tuple(labels)
    return FinitePoset(labels, pairs=[(labels[i], labels[i + 1])
                                      for i in range(len(labels) - 1)])


def discrete(labels):
    """The order with no relations beyond reflexivity."""
    return FinitePoset(labels)


def enumerate_partial_orders(labels, bound=5):
    """Yield every partial order on the given labels exactly once, in a
    deterministic order (graded by number of strict relations).

    Works by assigning one of {incomparable, a<b, b<a} to every unordered
    pair, closing transitively, discarding closures that break antisymmetry,
    and deduplicating.  Sizes beyond ``bound`` raise :class:`SizeBoundError`.
    """
    labels = tuple(labels)
    n = len(labels)
    if n > bound:
        raise SizeBoundError(
            "enumeration over %d labels exceeds the configured bound %d"
            % (n, bound))
    if n == 0:
        yield FinitePoset(())
        return
    idx_pairs = list(itertools.combinations(range(n), 2))
    seen = set()
    kept = []
    for choice in itertools.product((0, 1, 2), repeat=len(idx_pairs)):
        rows = [1 << i for i in range(n)]
        for (i, j), c in zip(idx_pairs, choice):
            if c == 1:
                rows[i] |= 1 << j
            elif c == 2:
                rows[j] |= 1 << i
        for k in range(n):
            bk = rows[k]
            for i in range(n):
                if rows[i] >> k & 1:
                    rows[i] |= bk
        key = tuple(rows)
        if key in seen:
            continue
        seen.add(key)
        if any(rows[i] >> j & 1 and rows[j] >> i & 1 for i, j in idx_pairs):
            continue
        kept.append(key)

    def strict_of(key):
        return tuple(sorted(
            (i, j) for i in range(n) for j in range(n)
            if i != j and key[i] >> j & 1))

    kept.sort(key=lambda k: (len(strict_of(k)), strict_of(k)))
    for key in kept:
        mat = np.zeros((n, n), dtype=bool)
        for i in range(n):
            for j in range(n):
                mat[i, j] = bool(key[i] >> j & 1)
        yield FinitePoset(labels, matrix=mat)


def _aligned(coarse, fine):
    if set(coarse.labels) != set(fine.labels):
        raise InputError("orders live on different ground sets: %r vs %r"
                         % (coarse.labels, fine.labels))


def dominates(coarse, fine):
    """If every relation of ``fine`` holds in ``coarse``, return the number
    of strict relations ``coarse`` adds; otherwise return None."""
    _aligned(coarse, fine)
    fine_pairs = fine.strict_pairs
    coarse_pairs = coarse.strict_pairs
    if not fine_pairs <= coarse_pairs:
        return None
    return len(coarse_pairs) - len(fine_pairs)


def f_sets(p):
    return p.f_sets


def g_pairs(p):
    return p.g_pairs


def h_pairs(p):
    return p.h_pairs


def connected_components(p):
    return p.components


def _pairs_transitive(pairs):
    s = set(pairs)
    return all((a, d) in s for (a, b) in s for (c, d) in s if b == c)


def orders_dominated_by(coarse):
    """All orders on the same labels whose relations sit inside ``coarse``,
    deterministically ordered."""
    return orders_between(discrete(coarse.labels), coarse)


def orders_between(fine, coarse):
    """All orders Q with fine <= Q <= coarse (relation containment).

    Requires ``coarse`` to dominate ``fine``.  Antisymmetry is inherited from
    ``coarse``; each candidate subset only needs a transitivity check.
    """
    _aligned(coarse, fine)
    if dominates(coarse, fine) is None:
        raise InputError("first order must be dominated by the second")
    base = fine.strict_pairs
    free = sorted(coarse.strict_pairs - base,
                  key=lambda p: (coarse.index(p[0]), coarse.index(p[1])))
    out = []
    for r in range(len(free) + 1):
        for combo in itertools.combinations(free, r):
            pairs = base | set(combo)
            if _pairs_transitive(pairs):
                out.append(FinitePoset(coarse.labels, pairs=pairs))
    return out
