"""Convolution products on iso-class functions of quiver representations.

The multiplication implemented here counts short exact sequences: the first
factor is evaluated on the subobject and the second on the quotient (note
that this is the opposite of the classical Hall-product convention).  A
commutative companion product counts internal direct-sum decompositions
instead of arbitrary subobjects.  Both come in two modes:

  * ``fixed-q``  -- exact structure counts over one finite field;
  * ``euler``    -- the counts are interpolated as polynomials in the field
                    size and read off at q = 1.

On top of the products sit indicator functions of the semistable / stable /
semistable-indecomposable loci, their alternating-sum transform, direct
counts of lower-set systems on a fixed object, closed torsor counts for
objects that split into same-value stable pieces, and a registry of identity
checks that produce machine-readable reports (used by the command line
front end and the acceptance tests).
"""

import itertools
import math
from fractions import Fraction

from . import config as cf
from . import posets as ps
from . import quiver as qv
from . import stability as st
from .classfn import IsoClassFunction
from .coeffs import n_coeff
from .errors import (InputError, NonPolynomialCountError, SizeBoundError,
                     UnsupportedError)
from .euler import DEFAULT_SAMPLES, EXTENDED_SAMPLES, interpolate
from .quiver import (QuiverRep, direct_sum, family_dims, family_leq,
                     hom_dim, quotient_rep, sub_rep, subobjects, zero_rep)

__all__ = [
    "UniformClass", "Corpus", "line_corpus", "jordan_corpus", "corpus_for",
    "hall_product", "split_product", "product_fold",
    "delta_zero", "delta_point", "delta_ss", "delta_si", "delta_st",
    "epsilon", "delta_ss_from_epsilon", "equal_tau_compositions",
    "count_systems", "system_pushforward", "system_count_function",
    "chain_class_count", "independent_line_tuples",
    "StableSum", "stable_sum", "stable_moduli_count", "stable_flag_sum",
    "stable_marking_chi", "split_decomposition_chi",
    "dense_loop_quiver", "sequence_witness_rep",
    "order_witness_counts", "order_witness_matrix", "sequence_witness_matrix",
    "IDENTITIES", "run_identity_check", "identity_ids", "perturbed_n_fn",
]


# --------------------------------------------------------------------------
# uniform iso-classes: one label, one representation per field size
# --------------------------------------------------------------------------

class UniformClass:
    """An isomorphism class described uniformly in the field size.

    ``label`` is hashable and field-independent, ``dims`` is the dimension
    vector, ``parts`` the multiset (sorted tuple) of indecomposable part
    tags, and ``build(q)`` returns the standard representative over F_q.
    """

    __slots__ = ("label", "dims", "parts", "_builder", "_reps")

    def __init__(self, label, dims, parts, builder):
        self.label = label
        self.dims = tuple(dims)
        self.parts = tuple(parts)
        self._builder = builder
        self._reps = {}

    @property
    def total_dim(self):
        return sum(self.dims)

    def build(self, q):
        rep = self._reps.get(q)
        if rep is None:
            rep = self._builder(q)
            if rep.dims != self.dims:
                raise InputError("builder for %r produced dims %r"
                                 % (self.label, rep.dims))
            self._reps[q] = rep
        return rep

    def __repr__(self):
        return "UniformClass(%r)" % (self.label,)


def _interval_builder(quiver, parts):
    def build(q):
        X = zero_rep(quiver, q)
        for lo, hi in parts:
            X = direct_sum(X, qv.interval_rep(quiver, q, lo, hi))
        return X
    return build


def _jordan_builder(quiver, parts):
    def build(q):
        if not parts:
            return zero_rep(quiver, q)
        return qv.jordan_rep(quiver, q, parts)
    return build


def _interval_multisets(n, max_total):
    """Sorted multisets of intervals [lo, hi] on n vertices, total <= bound."""
    intervals = [(lo, hi) for lo in range(n) for hi in range(lo, n)]
    out = []

    def rec(start, room, acc):
        out.append(tuple(acc))
        for k in range(start, len(intervals)):
            lo, hi = intervals[k]
            w = hi - lo + 1
            if w <= room:
                acc.append((lo, hi))
                rec(k, room - w, acc)
                acc.pop()

    rec(0, max_total, [])
    return out


class Corpus:
    """All uniform iso-classes on one quiver up to a total dimension.

    Holds the label arithmetic plus cached structure-count tables:
    ``subquotient_counts`` (how many subobjects of a class have prescribed
    sub/quotient classes) and ``split_pair_counts`` (how many ordered
    internal direct-sum decompositions realize a prescribed pair, computed
    by a torsor count from automorphism group orders).
    """

    def __init__(self, kind, quiver, max_total, classes):
        self.kind = kind
        self.quiver = quiver
        self.max_total = max_total
        self.classes = list(classes)
        self.by_label = {c.label: c for c in self.classes}
        self.by_dims = {}
        for c in self.classes:
            self.by_dims.setdefault(c.dims, []).append(c)
        self._subq = {}
        self._split = {}
        self._aut = {}
        self._end = {}
        self._eps_memo = {}
        self._pins = {}

    # -- labels ------------------------------------------------------------

    @property
    def zero_label(self):
        return (self.kind, ())

    def class_for(self, label):
        try:
            return self.by_label[label]
        except KeyError:
            raise InputError("label %r is not in this corpus" % (label,))

    def classes_of_dims(self, dims):
        return self.by_dims.get(tuple(dims), [])

    def sum_label(self, u, v):
        ku, pu = u
        kv, pv = v
        if ku != self.kind or kv != self.kind:
            raise InputError("labels %r, %r do not belong here" % (u, v))
        if self.kind == "jp":
            parts = tuple(sorted(pu + pv, reverse=True))
        else:
            parts = tuple(sorted(pu + pv))
        return (self.kind, parts)

    def label_of(self, X):
        """Label of an arbitrary representation on this corpus' quiver."""
        if X.quiver != self.quiver:
            raise InputError("representation lives on a different quiver")
        if X.total_dim == 0:
            return self.zero_label
        pieces = qv.decompose_indecomposable(X)
        tags = []
        for rep, mult in pieces:
            tags.extend([self._part_tag(rep)] * mult)
        if self.kind == "jp":
            parts = tuple(sorted(tags, reverse=True))
        else:
            parts = tuple(sorted(tags))
        label = (self.kind, parts)
        if label not in self.by_label and sum(X.dims) <= self.max_total:
            raise InputError("class %r missing from corpus" % (label,))
        return label

    def _part_tag(self, rep):
        if self.kind == "jp":
            return rep.total_dim
        ones = [i for i, d in enumerate(rep.dims) if d == 1]
        if (not ones or any(d not in (0, 1) for d in rep.dims)
                or ones != list(range(ones[0], ones[-1] + 1))):
            raise InputError("indecomposable %r is not an interval"
                             % (rep.dims,))
        return (ones[0], ones[-1])

    # -- structure-count tables ---------------------------------------------

    def aut(self, label, q):
        key = (label, q)
        if key not in self._aut:
            self._aut[key] = qv.aut_order(self.class_for(label).build(q))
        return self._aut[key]

    def end_dim(self, label):
        """dim End of a class (field-independent for uniform classes)."""
        if label not in self._end:
            rep = self.class_for(label).build(2)
            self._end[label] = hom_dim(rep, rep)
        return self._end[label]

    def subquotient_counts(self, label, q):
        """{(sub label, quotient label): count} over all subobjects."""
        key = (label, q)
        tab = self._subq.get(key)
        if tab is None:
            X = self.class_for(label).build(q)
            tab = {}
            for fam in subobjects(X):
                S, _ = sub_rep(X, fam)
                Q, _ = quotient_rep(X, fam)
                pair = (self.label_of(S), self.label_of(Q))
                tab[pair] = tab.get(pair, 0) + 1
            self._subq[key] = tab
        return tab

    def split_pair_counts(self, label, q):
        """{(u, v): count of ordered internal decompositions U + V = X}.

        Ordered pairs of complementary subobjects with prescribed classes
        form a single orbit under the automorphism group, with stabilizer
        the block pair of automorphism groups; the count is the index.
        """
        key = (label, q)
        tab = self._split.get(key)
        if tab is None:
            kind, parts = label
            tab = {}
            ax = self.aut(label, q)
            for left in _sub_multisets(parts):
                right = _multiset_diff(parts, left)
                if self.kind == "jp":
                    u = (kind, tuple(sorted(left, reverse=True)))
                    v = (kind, tuple(sorted(right, reverse=True)))
                else:
                    u = (kind, tuple(sorted(left)))
                    v = (kind, tuple(sorted(right)))
                cnt = Fraction(ax, self.aut(u, q) * self.aut(v, q))
                if cnt.denominator != 1:
                    raise NonPolynomialCountError(
                        "torsor count for %r = %r + %r is not integral"
                        % (label, u, v))
                tab[(u, v)] = int(cnt)
            self._split[key] = tab
        return tab

    def __repr__(self):
        return ("Corpus(kind=%r, quiver=%r, max_total=%d, classes=%d)"
                % (self.kind, self.quiver.name, self.max_total,
                   len(self.classes)))


def _sub_multisets(parts):
    """All sub-multisets of a sorted tuple, as tuples (with repetition)."""
    items = sorted(set(parts), key=repr)
    mults = [parts.count(x) for x in items]
    out = []
    for picks in itertools.product(*[range(m + 1) for m in mults]):
        acc = []
        for x, k in zip(items, picks):
            acc.extend([x] * k)
        out.append(tuple(acc))
    return out


def _multiset_diff(parts, sub):
    rest = list(parts)
    for x in sub:
        rest.remove(x)
    return tuple(rest)


def line_corpus(quiver, max_total):
    """Corpus of all classes on a linearly ordered quiver: every class is a
    multiset of interval representations (dimension vectors with a block of
    ones), which is complete for this shape."""
    if not quiver.is_line_shape():
        raise InputError("line corpora need a linearly ordered quiver")
    classes = []
    for parts in _interval_multisets(quiver.n, max_total):
        dims = [0] * quiver.n
        for lo, hi in parts:
            for i in range(lo, hi + 1):
                dims[i] += 1
        classes.append(UniformClass(("iv", parts), dims, parts,
                                    _interval_builder(quiver, parts)))
    classes.sort(key=lambda c: (c.total_dim, repr(c.label)))
    return Corpus("iv", quiver, max_total, classes)


def jordan_corpus(max_total):
    """Corpus of nilpotent classes on the one-loop quiver: one class per
    partition (the block sizes), which is complete for this shape."""
    quiver = qv.loop_quiver()
    classes = [UniformClass(("jp", ()), (0,), (),
                            _jordan_builder(quiver, ()))]
    for n in range(1, max_total + 1):
        for part in qv.partitions(n):
            part = tuple(sorted(part, reverse=True))
            classes.append(UniformClass(("jp", part), (n,), part,
                                        _jordan_builder(quiver, part)))
    classes.sort(key=lambda c: (c.total_dim, repr(c.label)))
    return Corpus("jp", quiver, max_total, classes)


_CORPUS_CACHE = {}


def corpus_for(quiver, max_total):
    """Memoized corpus lookup; line shapes and the one-loop quiver only."""
    key = (quiver, max_total)
    if key not in _CORPUS_CACHE:
        if quiver.is_loop_shape():
            _CORPUS_CACHE[key] = jordan_corpus(max_total)
        else:
            _CORPUS_CACHE[key] = line_corpus(quiver, max_total)
    return _CORPUS_CACHE[key]


# --------------------------------------------------------------------------
# products
# --------------------------------------------------------------------------

def _check_mode(mode, q):
    if mode not in ("fixed-q", "euler"):
        raise InputError("mode must be 'fixed-q' or 'euler', got %r"
                         % (mode,))
    if mode == "fixed-q" and q is None:
        raise InputError("fixed-q mode needs a field size q")


def _pair_degree_bound(cls):
    # crude but safe: the subobject count of X is bounded by the product of
    # per-vertex subspace counts, a polynomial of degree sum_v floor(d_v^2/4)
    return sum((d * d) // 4 for d in cls.dims)


def _convolve(f, g, corpus, table_fn, degree_fn, mode, q, samples):
    _check_mode(mode, q)
    support = {}
    grading = {}
    for cls in corpus.classes:
        grading[cls.label] = cls.dims

        def raw_count(qq, _label=cls.label):
            tab = table_fn(_label, qq)
            total = Fraction(0)
            for (u, v), cnt in tab.items():
                fu = f(u)
                if fu:
                    gv = g(v)
                    if gv:
                        total += cnt * fu * gv
            return total

        if mode == "fixed-q":
            val = raw_count(q)
        else:
            bound = degree_fn(cls)
            pts = tuple(samples) if samples is not None else None
            if pts is None:
                pts = (DEFAULT_SAMPLES if bound + 2 <= len(DEFAULT_SAMPLES)
                       else EXTENDED_SAMPLES)
            if bound + 2 > len(pts):
                raise SizeBoundError(
                    "need %d sample field sizes for degree %d, have %d"
                    % (bound + 2, bound, len(pts)))
            val = interpolate(raw_count, bound, pts[:bound + 2]).at_one
        if val:
            support[cls.label] = val
    return IsoClassFunction(support, grading=grading)


def hall_product(f, g, corpus, mode="euler", q=None, samples=None):
    """Convolution product: the value at a class counts its subobjects
    weighted by f on the subobject and g on the quotient.  In euler mode
    the count is interpolated in the field size and evaluated at 1."""
    return _convolve(f, g, corpus, corpus.subquotient_counts,
                     _pair_degree_bound, mode, q, samples)


def split_product(f, g, corpus, mode="euler", q=None, samples=None):
    """Commutative companion product over ordered internal direct-sum
    decompositions (a torsor count from automorphism group orders)."""

    def degree(cls):
        return corpus.end_dim(cls.label)

    return _convolve(f, g, corpus, corpus.split_pair_counts,
                     degree, mode, q, samples)


def product_fold(factors, corpus, product=hall_product, mode="euler",
                 q=None, samples=None):
    """Left fold of a nonempty list of class functions under a product."""
    factors = list(factors)
    if not factors:
        raise InputError("need at least one factor")
    acc = factors[0]
    for nxt in factors[1:]:
        if acc.is_zero():
            return acc
        acc = product(acc, nxt, corpus, mode=mode, q=q, samples=samples)
    return acc


def delta_zero(corpus):
    """Unit of both products: the indicator of the zero class."""
    return IsoClassFunction({corpus.zero_label: Fraction(1)},
                            grading={corpus.zero_label:
                                     corpus.class_for(corpus.zero_label).dims})


def delta_point(corpus, label):
    cls = corpus.class_for(label)
    return IsoClassFunction({label: Fraction(1)},
                            grading={label: cls.dims})


def _locus_indicator(corpus, alpha, sc, keep, mode, q, samples):
    _check_mode(mode, q)
    alpha = tuple(alpha)
    if all(a == 0 for a in alpha):
        raise InputError("indicator functions need a nonzero class")
    if mode == "fixed-q":
        qs = (q,)
    else:
        qs = tuple(samples) if samples is not None else DEFAULT_SAMPLES[:3]
    support = {}
    grading = {}
    for cls in corpus.classes_of_dims(alpha):
        grading[cls.label] = cls.dims
        votes = {keep(cls.build(qq)) for qq in qs}
        if len(votes) != 1:
            raise UnsupportedError(
                "locus membership of %r varies with the field size"
                % (cls.label,))
        if votes.pop():
            support[cls.label] = Fraction(1)
    return IsoClassFunction(support, grading=grading)


def delta_ss(corpus, alpha, sc, mode="euler", q=None, samples=None):
    """Indicator of the semistable classes of one dimension vector."""
    return _locus_indicator(
        corpus, alpha, sc,
        lambda rep: st.classify(rep, sc) != "unstable", mode, q, samples)


def delta_st(corpus, alpha, sc, mode="euler", q=None, samples=None):
    """Indicator of the stable classes of one dimension vector."""
    return _locus_indicator(
        corpus, alpha, sc,
        lambda rep: st.classify(rep, sc) == "stable", mode, q, samples)


def delta_si(corpus, alpha, sc, mode="euler", q=None, samples=None):
    """Indicator of the semistable indecomposable classes."""
    return _locus_indicator(
        corpus, alpha, sc,
        lambda rep: (st.classify(rep, sc) != "unstable"
                     and qv.is_indecomposable(rep)), mode, q, samples)


# --------------------------------------------------------------------------
# equal-value compositions and the alternating transform
# --------------------------------------------------------------------------

def equal_tau_compositions(alpha, sc, max_parts=None):
    """Ordered tuples of nonzero classes summing to alpha, every part with
    the same stability value as the total."""
    alpha = tuple(alpha)
    total = sum(alpha)
    if total == 0:
        raise InputError("compositions need a nonzero class")
    if max_parts is None:
        max_parts = total
    t0 = sc.tau(alpha)
    cand = [beta for beta in st.all_classes(len(alpha), total)
            if all(b <= a for b, a in zip(beta, alpha))
            and st.compare_values(sc.tau(beta), t0) == 0]
    out = []

    def rec(rest, acc):
        if all(r == 0 for r in rest):
            if acc:
                out.append(tuple(acc))
            return
        if len(acc) >= max_parts:
            return
        for beta in cand:
            if all(b <= r for b, r in zip(beta, rest)):
                acc.append(beta)
                rec(tuple(r - b for r, b in zip(rest, beta)), acc)
                acc.pop()

    rec(alpha, [])
    return out


def _sc_token(corpus, sc):
    token = id(sc)
    corpus._pins[token] = sc
    return token


def epsilon(corpus, alpha, sc, mode="euler", q=None, samples=None):
    """Alternating-sum transform of the semistable indicators:
    sum over equal-value ordered decompositions of the class, weighted by
    (-1)^(n-1)/n, of the product of the semistable indicators of the parts.
    """
    _check_mode(mode, q)
    alpha = tuple(alpha)
    if samples is not None:
        samples = tuple(samples)
    key = ("eps", _sc_token(corpus, sc), alpha, mode, q, samples)
    if key in corpus._eps_memo:
        return corpus._eps_memo[key]
    total = IsoClassFunction()
    for comp in equal_tau_compositions(alpha, sc):
        n = len(comp)
        parts = [delta_ss(corpus, beta, sc, mode=mode, q=q, samples=samples)
                 for beta in comp]
        prod = product_fold(parts, corpus, hall_product, mode=mode, q=q,
                            samples=samples)
        if not prod.is_zero():
            total = total + prod.scale(Fraction((-1) ** (n - 1), n))
    corpus._eps_memo[key] = total
    return total


def delta_ss_from_epsilon(corpus, beta, sc, mode="euler", q=None,
                          samples=None):
    """Reassemble the semistable indicator from the transform: sum over
    equal-value ordered decompositions, weighted by 1/m!, of the product
    of the transforms of the parts (the inverse of ``epsilon``)."""
    _check_mode(mode, q)
    beta = tuple(beta)
    total = IsoClassFunction()
    for comp in equal_tau_compositions(beta, sc):
        m = len(comp)
        parts = [epsilon(corpus, gamma, sc, mode=mode, q=q, samples=samples)
                 for gamma in comp]
        prod = product_fold(parts, corpus, hall_product, mode=mode, q=q,
                            samples=samples)
        if not prod.is_zero():
            total = total + prod.scale(Fraction(1, math.factorial(m)))
    return total


# --------------------------------------------------------------------------
# direct counting of lower-set systems on a fixed object
# --------------------------------------------------------------------------

_REQUIRE_KINDS = ("ss", "si", "st", "best")


def count_systems(X, poset, kappa, sc=None, require=()):
    """Number of lower-set systems on X over the poset with the prescribed
    principal classes, filtered by flags.

    ``require`` may contain "ss" (all principal subquotients semistable),
    "si" (semistable and indecomposable), "st" (stable) and "best" (no
    strict local improvement exists).  The stability flags need ``sc``.
    """
    require = tuple(require)
    for r in require:
        if r not in _REQUIRE_KINDS:
            raise InputError("unknown requirement %r" % (r,))
    if sc is None and any(r in ("ss", "si", "st") for r in require):
        raise InputError("stability flags need a stability condition")
    n = 0
    for fams in cf.iter_config_families(X, poset, kappa):
        if _system_passes(X, poset, fams, sc, require):
            n += 1
    return n


def _system_passes(X, poset, fams, sc, require):
    if any(r in ("ss", "si", "st") for r in require):
        factors = cf.principal_factors(X, poset, fams)
        kinds = {i: st.classify(factors[i], sc) for i in poset.labels}
        if "ss" in require and any(k == "unstable" for k in kinds.values()):
            return False
        if "st" in require and any(k != "stable" for k in kinds.values()):
            return False
        if "si" in require:
            if any(k == "unstable" for k in kinds.values()):
                return False
            if not all(qv.is_indecomposable(factors[i])
                       for i in poset.labels):
                return False
    if "best" in require:
        cfg = cf.build_configuration(X, poset, fams)
        if not cf.is_best(cfg):
            return False
    return True


def system_count_function(build, poset, kappa, sc=None, require=()):
    """q -> number of filtered systems on build(q); for interpolation."""
    def count(q):
        return count_systems(build(q), poset, kappa, sc, require)
    return count


def system_degree_bound(poset, kappa):
    total = [0] * len(next(iter(kappa.values())))
    for i in poset.labels:
        for v, d in enumerate(kappa[i]):
            total[v] += d
    return poset.n * sum((d * d) // 4 for d in total)


def system_pushforward(corpus, poset, kappa, sc=None, require=(),
                       mode="fixed-q", q=None, samples=None,
                       degree_bound=None):
    """Class function whose value at a class is the (filtered) system count
    on its representative; interpolated in euler mode."""
    _check_mode(mode, q)
    kap = {i: tuple(kappa[i]) for i in poset.labels}
    alpha = tuple(sum(k[v] for k in kap.values())
                  for v in range(corpus.quiver.n))
    support = {}
    grading = {}
    for cls in corpus.classes_of_dims(alpha):
        grading[cls.label] = cls.dims
        count = system_count_function(cls.build, poset, kap, sc, require)
        if mode == "fixed-q":
            val = Fraction(count(q))
        else:
            bound = (degree_bound if degree_bound is not None
                     else system_degree_bound(poset, kap))
            pts = tuple(samples) if samples is not None else EXTENDED_SAMPLES
            if bound + 2 > len(pts):
                raise SizeBoundError(
                    "need %d sample field sizes for degree %d"
                    % (bound + 2, bound))
            val = interpolate(count, bound, pts[:bound + 2]).at_one
        if val:
            support[cls.label] = val
    return IsoClassFunction(support, grading=grading)


def chain_class_count(X, jumps):
    """Number of chains of subobjects 0 = U_0 <= ... <= U_n = X whose
    successive quotients have the prescribed dimension vectors."""
    jumps = [tuple(j) for j in jumps]
    prefix = []
    run = tuple(0 for _ in X.dims)
    for j in jumps:
        run = tuple(a + b for a, b in zip(run, j))
        prefix.append(run)
    if prefix and prefix[-1] != X.dims:
        return 0
    by_dims = {}
    for fam in subobjects(X):
        by_dims.setdefault(family_dims(fam), []).append(fam)
    F = X.F
    lower = qv.zero_family(X)

    def rec(t, lower):
        if t == len(prefix):
            return 1
        total = 0
        for fam in by_dims.get(prefix[t], ()):
            if family_leq(F, lower, fam):
                total += rec(t + 1, fam)
        return total

    return rec(0, lower)


# --------------------------------------------------------------------------
# torsor counting for sums of same-value stable pieces
# --------------------------------------------------------------------------

def independent_line_tuples(k, r, q):
    """Ordered r-tuples of linearly independent lines in a k-dimensional
    space over F_q."""
    if r > k:
        return 0
    def lines(d):
        return (q ** d - 1) // (q - 1)
    total = 1
    for j in range(r):
        total *= lines(k) - lines(j)
    return total


class StableSum:
    """An object that is a direct sum of pairwise nonisomorphic stable
    pieces of one common stability value, with multiplicities.

    Lower-set systems whose principal subquotients are stable of these
    classes factor through the hom spaces of the pieces: every stage is
    semisimple of the common value (an extension of equal-value stables
    inside a split object splits), so it is the span of one subspace per
    piece type inside Hom(piece, sum), and systems correspond to tuples
    of independent lines up to a uniform power of q.  This gives closed
    structure counts valid at every field size, which the tests
    cross-check against direct lattice enumeration.
    """

    def __init__(self, quiver, sc, parts, builders, mults, hom_dims):
        self.quiver = quiver
        self.sc = sc
        self.parts = parts          # tuple of dimension vectors, one per type
        self.builders = builders    # tuple of callables q -> piece rep
        self.mults = tuple(mults)   # multiplicities l_m
        self.hom_dims = tuple(hom_dims)  # k_m = dim Hom(S_m, X)
        self.ntypes = len(parts)

    @property
    def size(self):
        return sum(self.mults)

    @property
    def hom_total(self):
        return sum(self.hom_dims)

    def dims(self):
        n = self.quiver.n
        return tuple(sum(m * p[v] for m, p in zip(self.mults, self.parts))
                     for v in range(n))

    def build(self, q):
        X = zero_rep(self.quiver, q)
        for builder, m in zip(self.builders, self.mults):
            for _ in range(m):
                X = direct_sum(X, builder(q))
        return X


def stable_sum(quiver, sc, pieces, check_qs=(2, 3)):
    """Validate and package a direct sum of stable pieces.

    ``pieces`` is a list of (builder, multiplicity).  Checks, over the
    fields in ``check_qs``: every piece is stable with a one-dimensional
    endomorphism ring, the stability values all agree, the dimension
    vectors are pairwise distinct, and dim Hom(piece, sum) matches the
    multiplicity (so line counts live in the right hom spaces).
    """
    builders = tuple(b for b, _ in pieces)
    mults = tuple(int(m) for _, m in pieces)
    if not builders or any(m <= 0 for m in mults):
        raise InputError("need at least one piece, all multiplicities > 0")
    parts = None
    hom_dims = None
    for q in check_qs:
        reps = [b(q) for b in builders]
        dims = tuple(r.dims for r in reps)
        if len(set(dims)) != len(dims):
            raise UnsupportedError(
                "piece classes must have pairwise distinct dimension "
                "vectors")
        tau0 = sc.tau(reps[0].dims)
        for r in reps:
            if st.classify(r, sc) != "stable":
                raise InputError("piece %r is not stable" % (r.dims,))
            if hom_dim(r, r) != 1:
                raise UnsupportedError(
                    "piece %r has endomorphisms beyond scalars" % (r.dims,))
            if st.compare_values(sc.tau(r.dims), tau0) != 0:
                raise InputError(
                    "pieces carry different stability values")
        X = zero_rep(quiver, q)
        for r, m in zip(reps, mults):
            for _ in range(m):
                X = direct_sum(X, r)
        kms = tuple(hom_dim(r, X) for r in reps)
        if parts is None:
            parts, hom_dims = dims, kms
        elif parts != dims or hom_dims != kms:
            raise UnsupportedError(
                "piece data varies with the field size")
    return StableSum(quiver, sc, parts, builders, mults, hom_dims)


def _type_of_class(ssum, beta):
    beta = tuple(beta)
    for m, p in enumerate(ssum.parts):
        if p == beta:
            return m
    raise InputError("class %r is not a piece class" % (beta,))


def stable_moduli_count(ssum, poset, type_map, q, best=False):
    """Number of lower-set systems on the stable sum with all principal
    subquotients stable of the classes picked by ``type_map``
    (label -> piece type index).  Every subquotient between two systems'
    stages is semistable of the common value, hence splits; so a system
    with a nontrivial relation always improves, and only systems over the
    discrete order can be best.

    Tuples of independent lines map onto systems (line i spans the new
    direction of the stage at label i), but not bijectively: a system
    lifts to exactly q^e tuples, where e is the number of strict order
    relations between labels of the same piece type (the new direction at
    a label is only determined modulo the earlier stage within its type).
    """
    if best and not poset.is_discrete():
        return 0
    counts = [0] * ssum.ntypes
    for i in poset.labels:
        counts[type_map[i]] += 1
    total = 1
    for m in range(ssum.ntypes):
        total *= independent_line_tuples(ssum.hom_dims[m], counts[m], q)
    e = sum(1 for a, b in poset.strict_pairs if type_map[a] == type_map[b])
    lifted = Fraction(total, q ** e)
    if lifted.denominator != 1:
        raise NonPolynomialCountError(
            "tuple count %d is not divisible by the lift factor %d"
            % (total, q ** e))
    return int(lifted)


def _full_type_maps(ssum, labels):
    """Assignments label -> type with each type used exactly its
    multiplicity (the only way the principal classes can sum to the
    total class when the piece classes are linearly independent)."""
    slots = []
    for m, l in enumerate(ssum.mults):
        slots.extend([m] * l)
    if len(slots) != len(labels):
        raise InputError("label count must match the number of pieces")
    out = set()
    for perm in itertools.permutations(slots):
        out.add(perm)
    return [dict(zip(labels, perm)) for perm in sorted(out)]


def _marking_type_maps(ssum, labels):
    return [dict(zip(labels, picks))
            for picks in itertools.product(range(ssum.ntypes),
                                           repeat=len(labels))]


def _chi_of_counts(count_fn, degree, samples=None):
    pts = tuple(samples) if samples is not None else EXTENDED_SAMPLES
    if degree + 2 > len(pts):
        raise SizeBoundError("need %d sample field sizes" % (degree + 2,))
    return interpolate(count_fn, degree, pts[:degree + 2]).at_one


def stable_flag_sum(ssum, size_a, variant="total", samples=None):
    """Interpolated total of best stable system counts over index orders.

    variant "total":    all orders and all class assignments;
    variant "contains": orders whose minimal labels include the first
                        ``size_a`` labels;
    variant "exact":    orders whose minimal label set equals them.
    Returns (value, per_q) where per_q maps each sampled field size to the
    raw count.
    """
    labels = tuple(range(1, ssum.size + 1))
    marked = set(labels[:size_a])
    orders = list(ps.enumerate_partial_orders(labels))
    tmaps = _full_type_maps(ssum, labels)
    chosen = []
    for p in orders:
        minimal = {i for i in labels if p.down_set(i) == frozenset({i})}
        if variant == "total":
            keep = True
        elif variant == "contains":
            keep = marked <= minimal
        elif variant == "exact":
            keep = marked == minimal
        else:
            raise InputError("unknown variant %r" % (variant,))
        if keep:
            chosen.append(p)

    def count(q):
        total = 0
        for p in chosen:
            for tmap in tmaps:
                total += stable_moduli_count(ssum, p, tmap, q, best=True)
        return total

    degree = sum(k * k for k in ssum.hom_dims)
    pts = tuple(samples) if samples is not None else EXTENDED_SAMPLES
    value = _chi_of_counts(count, degree, pts)
    per_q = {qq: count(qq) for qq in pts[:degree + 2]}
    return value, per_q


def stable_marking_chi(ssum, size_a, samples=None):
    """Interpolated count of markings: tuples of stable subobjects indexed
    by ``size_a`` antichain labels under one top element, every class
    allowed, jointly in general position.  Returns (value, per_q)."""
    labels = tuple(range(1, size_a + 1))
    tmaps = _marking_type_maps(ssum, labels)

    def count(q):
        total = 0
        for tmap in tmaps:
            counts = [0] * ssum.ntypes
            for i in labels:
                counts[tmap[i]] += 1
            term = 1
            for m in range(ssum.ntypes):
                term *= independent_line_tuples(ssum.hom_dims[m],
                                                counts[m], q)
            total += term
        return total

    degree = sum(k * k for k in ssum.hom_dims)
    pts = tuple(samples) if samples is not None else EXTENDED_SAMPLES
    value = _chi_of_counts(count, degree, pts)
    per_q = {qq: count(qq) for qq in pts[:degree + 2]}
    return value, per_q


def split_decomposition_chi(ssum, samples=None):
    """Euler number of Aut(sum) / prod Aut(piece)^mult, interpolated from
    the exact group orders."""
    from .euler import GroupQuotientSpec, chi_homogeneous

    def group_order(q):
        return qv.aut_order(ssum.build(q))

    def subgroup_order(q):
        total = 1
        for b, m in zip(ssum.builders, ssum.mults):
            total *= qv.aut_order(b(q)) ** m
        return total

    X2 = ssum.build(2)
    spec = GroupQuotientSpec(group_order, subgroup_order,
                             degree_bound=hom_dim(X2, X2),
                             samples=(tuple(samples) if samples is not None
                                      else EXTENDED_SAMPLES))
    return chi_homogeneous(spec)


# --------------------------------------------------------------------------
# witness representations
# --------------------------------------------------------------------------

def dense_loop_quiver(n):
    """Quiver on n vertices with one arrow for every ordered pair,
    including a loop at every vertex."""
    verts = tuple(str(i) for i in range(1, n + 1))
    arrows = tuple((a, b) for a in verts for b in verts)
    return qv.Quiver(verts, arrows, name="denseloop%d" % n)


def sequence_witness_rep(n, seq, q):
    """Nilpotent representation of the dense loop quiver on n vertices
    remembering an ordered sequence of vertices: one basis vector per
    position, and the arrow u -> w moves position a to position a-1
    exactly when the sequence reads w at a-1 and u at a.

    Chains of subobjects with one-dimensional jumps then spell out the
    sequence: the count of chains with jumps (e_{j_1}, ..., e_{j_m}) is
    one when (j_1, ..., j_m) equals the sequence and zero otherwise.
    """
    quiver = dense_loop_quiver(n)
    seq = tuple(int(s) for s in seq)
    if any(not 1 <= s <= n for s in seq):
        raise InputError("sequence entries must be vertices 1..%d" % n)
    dims = tuple(sum(1 for s in seq if s == v + 1) for v in range(n))
    positions = {v: [a for a, s in enumerate(seq) if s == v]
                 for v in range(1, n + 1)}
    maps = []
    for a in range(len(quiver.arrows)):
        si, ti = quiver.arrow_endpoints(a)
        u, w = si + 1, ti + 1
        M = [[0] * dims[ti] for _ in range(dims[si])]
        for row, pos in enumerate(positions[u]):
            if pos >= 1 and seq[pos - 1] == w:
                M[row][positions[w].index(pos - 1)] = 1
        maps.append(tuple(tuple(r) for r in M))
    return QuiverRep(quiver, q, dims, maps)


def order_witness_counts(index_poset, witness_poset, q, require=("best",)):
    """Filtered system count on the order-remembering witness of one poset,
    indexed by another poset, all principal classes one-dimensional."""
    X = cf.order_witness_rep(witness_poset, q)
    n = X.quiver.n
    kappa = {i: tuple(1 if v == index_poset.labels.index(i) else 0
                      for v in range(n))
             for i in index_poset.labels}
    sc = st.trivial_condition()
    return count_systems(X, index_poset, kappa, sc, require)


def order_witness_matrix(nlabels, q, require=("best", "st")):
    """Square matrix of filtered system counts: rows are index orders,
    columns are witness orders, over all partial orders on the labels."""
    labels = tuple(range(1, nlabels + 1))
    orders = list(ps.enumerate_partial_orders(labels))
    sc = st.trivial_condition()
    n = len(labels)
    kappa_for = {i: tuple(1 if v == labels.index(i) else 0 for v in range(n))
                 for i in labels}
    mat = []
    for idx in orders:
        row = []
        for wit in orders:
            X = cf.order_witness_rep(wit, q)
            row.append(count_systems(X, idx, kappa_for, sc, require))
        mat.append(row)
    return orders, mat


def sequence_witness_matrix(n, max_len, q):
    """Chain-count table: rows are jump sequences, columns are witness
    sequences, entries count subobject chains with those jumps."""
    seqs = []
    for ln in range(1, max_len + 1):
        seqs.extend(itertools.product(range(1, n + 1), repeat=ln))
    mat = []
    for row_seq in seqs:
        jumps = [tuple(1 if v + 1 == s else 0 for v in range(n))
                 for s in row_seq]
        row = []
        for col_seq in seqs:
            W = sequence_witness_rep(n, col_seq, q)
            row.append(chain_class_count(W, jumps))
        mat.append(row)
    return seqs, mat


def _fraction_det(mat):
    m = [[Fraction(x) for x in row] for row in mat]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


# --------------------------------------------------------------------------
# identity registry
# --------------------------------------------------------------------------

def perturbed_n_fn(delta=1):
    """A deliberately wrong chain-count coefficient: the value for the
    two-label pair (discrete under a chain) is shifted.  Used as the
    negative control."""
    def n_fn(fine, coarse):
        base = n_coeff(fine, coarse)
        if (len(fine.labels) == 2 and not fine.strict_pairs
                and len(coarse.strict_pairs) == 1):
            return base + delta
        return base
    return n_fn


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(
            x.items(), key=lambda kv: repr(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, frozenset):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, IsoClassFunction):
        return {repr(k): _jsonable(v) for k, v in x.items()}
    return x


def _report(identity_id, instance, mode, lhs, rhs, equal, per_q=None,
            witnesses=None):
    return {
        "identity_id": identity_id,
        "statement": IDENTITIES[identity_id]["statement"],
        "instance": _jsonable(instance),
        "mode": mode,
        "lhs": _jsonable(lhs),
        "rhs": _jsonable(rhs),
        "equal": bool(equal),
        "per_q_counts": _jsonable(per_q if per_q is not None else {}),
        "witnesses": _jsonable(witnesses if witnesses is not None else []),
    }


def _named_quiver(name):
    table = {
        "a2": qv.line_quiver(2),
        "a3": qv.line_quiver(3),
        "a4": qv.line_quiver(4),
        "loop": qv.loop_quiver(),
    }
    if isinstance(name, qv.Quiver):
        return name
    try:
        return table[str(name).lower()]
    except KeyError:
        raise InputError("unknown quiver name %r" % (name,))


def _instance_sc(instance, quiver):
    text = instance.get("stability", "trivial")
    if isinstance(text, st.StabilityCondition):
        return text
    return st.parse_stability(text, quiver)


def _line_sc_default(quiver):
    c = tuple(quiver.n - i for i in range(quiver.n))
    return st.slope_condition(c, (1,) * quiver.n)


# -- individual identity runners -------------------------------------------

def _run_order_chain_inversion(instance, n_fn=None):
    nlabels = int(instance.get("labels", 3))
    labels = tuple(range(1, nlabels + 1))
    fn = n_fn if n_fn is not None else n_coeff
    failures = []
    cases = 0
    for coarse in ps.enumerate_partial_orders(labels):
        for fine in ps.orders_dominated_by(coarse):
            want = 1 if frozenset(fine.strict_pairs) == frozenset(
                coarse.strict_pairs) else 0
            mids = ps.orders_between(fine, coarse)
            s1 = sum(fn(mid, coarse) for mid in mids)
            s2 = sum(fn(fine, mid) for mid in mids)
            cases += 1
            if s1 != want or s2 != want:
                failures.append({
                    "fine": sorted(map(list, fine.strict_pairs)),
                    "coarse": sorted(map(list, coarse.strict_pairs)),
                    "sum_lower": s1, "sum_upper": s2, "want": want,
                })
    return _report(
        "order-chain-inversion", instance, "exact",
        {"cases": cases, "failing": len(failures)},
        {"cases": cases, "failing": 0},
        not failures, witnesses=failures[:5])


def _allowable_collapses(nlabels, tsize):
    from .coeffs import SurjectionData, is_allowable, surjections
    labels = tuple(range(1, nlabels + 1))
    targets = tuple("abcd"[:tsize])
    for source in ps.enumerate_partial_orders(labels):
        for phi in surjections(labels, targets):
            s = SurjectionData(source, targets, phi)
            if is_allowable(s):
                yield s


def _collapse_witness(s):
    return {
        "order": sorted(map(list, s.source.strict_pairs)),
        "phi": [[str(a), str(v)]
                for a, v in zip(s.source.labels, s.phi_values)],
    }


def _run_collapse_inversion(instance, n_fn=None):
    del n_fn
    from .coeffs import check_N_inversion
    nlabels = int(instance.get("labels", 3))
    tsize = int(instance.get("targets", 2))
    failures = []
    cases = 0
    for s in _allowable_collapses(nlabels, tsize):
        cases += 1
        if not check_N_inversion(s):
            failures.append(_collapse_witness(s))
    return _report(
        "collapse-inversion", instance, "exact",
        {"cases": cases, "failing": len(failures)},
        {"cases": cases, "failing": 0},
        not failures, witnesses=failures[:5])


def _run_collapse_product(instance, n_fn=None):
    del n_fn
    from .coeffs import check_N_product
    nlabels = int(instance.get("labels", 3))
    tsize = int(instance.get("targets", 2))
    failures = []
    cases = 0
    for s in _allowable_collapses(nlabels, tsize):
        cases += 1
        if not check_N_product(s):
            failures.append(_collapse_witness(s))
    return _report(
        "collapse-product-rule", instance, "exact",
        {"cases": cases, "failing": len(failures)},
        {"cases": cases, "failing": 0},
        not failures, witnesses=failures[:5])


def _semisimple_stable_sum(quiver, mults):
    sc = st.trivial_condition()
    pieces = []
    for v, m in zip(quiver.vertices, mults):
        if m:
            pieces.append((lambda q, _v=v: qv.simple_rep(quiver, q, _v), m))
    return stable_sum(quiver, sc, pieces)


def _stable_sum_from_instance(instance):
    quiver = _named_quiver(instance.get("quiver", "a2"))
    kind = instance.get("pieces", "simple")
    mults = tuple(int(m) for m in instance.get("mults", (2, 1)))
    if kind == "simple":
        return _semisimple_stable_sum(quiver, mults)
    if kind == "interval":
        default_sc = "slope c=%s r=%s" % (
            ",".join("%s:%d" % (v, quiver.n - i)
                     for i, v in enumerate(quiver.vertices)),
            ",".join("%s:1" % v for v in quiver.vertices))
        sc = _instance_sc({"stability": instance.get(
            "stability", default_sc)}, quiver)
        lo, hi = instance.get("interval", (0, quiver.n - 1))
        m = mults[0]
        return stable_sum(
            quiver, sc,
            [(lambda q, _l=lo, _h=hi: qv.interval_rep(quiver, q, _l, _h),
              m)])
    raise InputError("unknown piece kind %r" % (kind,))


def _run_split_decomposition_count(instance, n_fn=None):
    del n_fn
    ssum = _stable_sum_from_instance(instance)
    want = Fraction(1)
    for m in ssum.mults:
        want *= math.factorial(m)
    got = split_decomposition_chi(ssum)
    # independent route: systems over the discrete order, every label a
    # stable piece, counted by lines and interpolated
    labels = tuple(range(1, ssum.size + 1))
    disc = ps.discrete(labels)
    tmaps = _full_type_maps(ssum, labels)

    def count(q):
        return sum(stable_moduli_count(ssum, disc, tm, q, best=True)
                   for tm in tmaps)

    degree = sum(k * k for k in ssum.hom_dims)
    chi_systems = _chi_of_counts(count, degree)
    perm = Fraction(math.factorial(ssum.size))
    for m in ssum.mults:
        perm /= math.factorial(m)
    systems_want = perm * want
    equal = (got == want) and (chi_systems == systems_want)
    return _report(
        "split-decomposition-count", instance, "euler",
        {"aut_quotient_chi": got, "discrete_system_chi": chi_systems},
        {"aut_quotient_chi": want, "discrete_system_chi": systems_want},
        equal,
        per_q={2: count(2), 3: count(3)})


def _run_stable_flag(variant_slug, variant, instance, rhs_fn):
    ssum = _stable_sum_from_instance(instance)
    sizes = instance.get("marked_sizes")
    if sizes is None:
        sizes = list(range(0, ssum.size + 1))
    k = ssum.hom_total
    lhs = {}
    rhs = {}
    per_q = {}
    equal = True
    for a in sizes:
        val, pq = stable_flag_sum(ssum, a, variant=variant)
        want = rhs_fn(ssum.size, k, a)
        lhs[a] = val
        rhs[a] = want
        per_q[a] = pq
        equal = equal and val == want
    return _report(variant_slug, instance, "euler", lhs, rhs, equal,
                   per_q=per_q)


def _run_stable_flag_subset(instance, n_fn=None):
    del n_fn

    def want(nlab, k, a):
        if a > k:
            return Fraction(0)
        return Fraction(math.factorial(nlab - a) * math.factorial(k),
                        math.factorial(k - a))

    return _run_stable_flag("stable-flag-count-subset", "contains",
                            instance, want)


def _run_stable_flag_exact(instance, n_fn=None):
    del n_fn

    def want(nlab, k, a):
        if a < k:
            return Fraction(0)
        return Fraction(math.factorial(nlab - k) * math.factorial(k))

    return _run_stable_flag("stable-flag-count-exact", "exact",
                            instance, want)


def _run_stable_flag_total(instance, n_fn=None):
    del n_fn
    ssum = _stable_sum_from_instance(instance)
    val, pq = stable_flag_sum(ssum, 0, variant="total")
    want = Fraction(math.factorial(ssum.size))
    return _report("stable-flag-count-total", instance, "euler",
                   val, want, val == want, per_q=pq)


def _run_stable_marking(instance, n_fn=None):
    del n_fn
    ssum = _stable_sum_from_instance(instance)
    sizes = instance.get("marked_sizes")
    if sizes is None:
        sizes = list(range(0, ssum.hom_total + 1))
    lhs, rhs, per_q = {}, {}, {}
    equal = True
    k = ssum.hom_total
    for a in sizes:
        val, pq = stable_marking_chi(ssum, a)
        want = (Fraction(math.factorial(k), math.factorial(k - a))
                if a <= k else Fraction(0))
        lhs[a], rhs[a], per_q[a] = val, want, pq
        equal = equal and val == want
    return _report("stable-marking-count", instance, "euler",
                   lhs, rhs, equal, per_q=per_q)


def _corpus_from_instance(instance):
    quiver = _named_quiver(instance.get("quiver", "a2"))
    max_total = int(instance.get("max_total", 4))
    return corpus_for(quiver, max_total)


def _instance_classes(instance, corpus):
    alpha = instance.get("alpha")
    if alpha is not None:
        return [tuple(int(a) for a in alpha)]
    bound = int(instance.get("max_total", corpus.max_total))
    return st.all_classes(corpus.quiver.n, bound)


def _run_split_into_indecomposables(instance, n_fn=None):
    del n_fn
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    failures = []
    checked = 0
    for alpha in _instance_classes(instance, corpus):
        lhs = delta_ss(corpus, alpha, sc)
        total = IsoClassFunction()
        for comp in equal_tau_compositions(alpha, sc):
            n = len(comp)
            parts = [delta_si(corpus, beta, sc) for beta in comp]
            prod = product_fold(parts, corpus, split_product, mode="euler")
            if not prod.is_zero():
                total = total + prod.scale(
                    Fraction(1, math.factorial(n)))
        checked += 1
        if total != lhs:
            failures.append({"alpha": list(alpha),
                             "lhs": lhs, "rhs": total})
    return _report(
        "split-into-indecomposables", instance, "euler",
        {"classes": checked, "failing": len(failures)},
        {"classes": checked, "failing": 0},
        not failures, witnesses=failures[:3])


def _run_semistable_split_log(instance, n_fn=None):
    del n_fn
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    failures = []
    checked = 0
    for beta in _instance_classes(instance, corpus):
        lhs = delta_si(corpus, beta, sc)
        total = IsoClassFunction()
        for comp in equal_tau_compositions(beta, sc):
            n = len(comp)
            parts = [delta_ss(corpus, g, sc) for g in comp]
            prod = product_fold(parts, corpus, split_product, mode="euler")
            if not prod.is_zero():
                total = total + prod.scale(Fraction((-1) ** (n - 1), n))
        checked += 1
        if total != lhs:
            failures.append({"beta": list(beta), "lhs": lhs, "rhs": total})
    return _report(
        "semistable-split-log", instance, "euler",
        {"classes": checked, "failing": len(failures)},
        {"classes": checked, "failing": 0},
        not failures, witnesses=failures[:3])


def _run_composition_inverse_pair(instance, n_fn=None):
    del n_fn
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    modes = instance.get("modes")
    if modes is None:
        modes = [("fixed-q", 2), ("fixed-q", 3), ("fixed-q", 4),
                 ("euler", None)]
    failures = []
    checked = 0
    for mode, q in modes:
        for beta in _instance_classes(instance, corpus):
            lhs = delta_ss(corpus, beta, sc, mode=mode, q=q)
            rhs = delta_ss_from_epsilon(corpus, beta, sc, mode=mode, q=q)
            checked += 1
            if lhs != rhs:
                failures.append({"mode": mode, "q": q, "beta": list(beta),
                                 "lhs": lhs, "rhs": rhs})
    return _report(
        "composition-inverse-pair", instance, "fixed-q+euler",
        {"cases": checked, "failing": len(failures)},
        {"cases": checked, "failing": 0},
        not failures, witnesses=failures[:3])


def _run_indecomposable_support(instance, n_fn=None):
    del n_fn
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    failures = []
    checked = 0
    for alpha in _instance_classes(instance, corpus):
        eps = epsilon(corpus, alpha, sc)
        for cls in corpus.classes_of_dims(alpha):
            val = eps(cls.label)
            decmp = len(cls.parts) > 1
            stab = st.classify(cls.build(2), sc) == "stable"
            checked += 1
            if decmp and val != 0:
                failures.append({"label": repr(cls.label),
                                 "value": val, "want": 0})
            if stab and val != 1:
                failures.append({"label": repr(cls.label),
                                 "value": val, "want": 1})
    return _report(
        "indecomposable-support", instance, "euler",
        {"cases": checked, "failing": len(failures)},
        {"cases": checked, "failing": 0},
        not failures, witnesses=failures[:5])


def _chain_poset(labels):
    return ps.chain(labels)


def _concat_poset(pI, pJ):
    labels = pI.labels + pJ.labels
    pairs = (list(pI.strict_pairs) + list(pJ.strict_pairs)
             + [(i, j) for i in pI.labels for j in pJ.labels])
    return ps.FinitePoset(labels, pairs=pairs)


def _interleavings(pI, pJ):
    """All orders on the disjoint union restricting to the two factors,
    never placing a second-factor label below a first-factor one."""
    labels = pI.labels + pJ.labels
    base = list(pI.strict_pairs) + list(pJ.strict_pairs)
    cross = [(i, j) for i in pI.labels for j in pJ.labels]
    out = []
    seen = set()
    for extra in itertools.chain.from_iterable(
            itertools.combinations(cross, r)
            for r in range(len(cross) + 1)):
        try:
            p = ps.FinitePoset(labels, pairs=list(base) + list(extra))
        except InputError:
            continue
        sig = frozenset(p.strict_pairs)
        if sig in seen:
            continue
        # transitive closures may add pairs outside `extra`; keep orders
        # whose restrictions are exactly the two factors and whose cross
        # pairs never point backwards
        if any(p.lt(j, i) for i in pI.labels for j in pJ.labels):
            continue
        if (frozenset(p.restrict(frozenset(pI.labels)).strict_pairs)
                != frozenset(pI.strict_pairs)):
            continue
        if (frozenset(p.restrict(frozenset(pJ.labels)).strict_pairs)
                != frozenset(pJ.strict_pairs)):
            continue
        seen.add(sig)
        out.append(p)
    return out


def _poset_from_spec(spec, offset=0):
    """[nlabels, [[a, b], ...]] -> poset with labels shifted by offset."""
    nlabels, pairs = spec
    labels = tuple(range(1 + offset, nlabels + 1 + offset))
    return ps.FinitePoset(labels,
                          pairs=[(a + offset, b + offset) for a, b in pairs])


def _kappa_from_spec(poset, kap_spec):
    return {i: tuple(kap_spec[k]) for k, i in enumerate(poset.labels)}


def _run_product_concatenation(instance, n_fn=None):
    del n_fn
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    pI = _poset_from_spec(instance.get("left", [2, []]))
    pJ = _poset_from_spec(instance.get("right", [1, []]),
                          offset=len(pI.labels))
    kapI = _kappa_from_spec(pI, instance.get(
        "left_kappa", [[1, 0], [0, 1]][:len(pI.labels)]))
    kapJ = _kappa_from_spec(pJ, instance.get(
        "right_kappa", [[1, 0]][:len(pJ.labels)]))
    require = tuple(instance.get("require", ("ss",)))
    qs = tuple(instance.get("qs", (2, 3)))
    pK = _concat_poset(pI, pJ)
    kapK = dict(kapI)
    kapK.update(kapJ)
    failures = []
    checked = 0
    for q in qs:
        fI = system_pushforward(corpus, pI, kapI, sc, require,
                                mode="fixed-q", q=q)
        fJ = system_pushforward(corpus, pJ, kapJ, sc, require,
                                mode="fixed-q", q=q)
        lhs = hall_product(fI, fJ, corpus, mode="fixed-q", q=q)
        rhs = system_pushforward(corpus, pK, kapK, sc, require,
                                 mode="fixed-q", q=q)
        checked += 1
        if lhs != rhs:
            failures.append({"q": q, "lhs": lhs, "rhs": rhs})
    if instance.get("euler", True):
        fI = system_pushforward(corpus, pI, kapI, sc, require, mode="euler")
        fJ = system_pushforward(corpus, pJ, kapJ, sc, require, mode="euler")
        lhs = hall_product(fI, fJ, corpus, mode="euler",
                           samples=EXTENDED_SAMPLES)
        rhs = system_pushforward(corpus, pK, kapK, sc, require,
                                 mode="euler")
        checked += 1
        if lhs != rhs:
            failures.append({"q": "euler", "lhs": lhs, "rhs": rhs})
    return _report(
        "product-concatenation", instance, "fixed-q+euler",
        {"cases": checked, "failing": len(failures)},
        {"cases": checked, "failing": 0},
        not failures, witnesses=failures[:3])


def _run_best_product_interleaving(instance, n_fn=None):
    """Unlike plain concatenation, the interleaving identity only holds
    after interpolation at q = 1: one subobject/quotient pair of best
    systems lifts to an affine space of interleaved systems, so the raw
    counts differ by powers of q.  Both sides are interpolated."""
    del n_fn
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    pI = _poset_from_spec(instance.get("left", [2, []]))
    pJ = _poset_from_spec(instance.get("right", [1, []]),
                          offset=len(pI.labels))
    kapI = _kappa_from_spec(pI, instance.get(
        "left_kappa", [[1, 0], [0, 1]][:len(pI.labels)]))
    kapJ = _kappa_from_spec(pJ, instance.get(
        "right_kappa", [[1, 0]][:len(pJ.labels)]))
    base_req = tuple(instance.get("require", ("ss",)))
    require = tuple(sorted(set(base_req) | {"best"}))
    posets = _interleavings(pI, pJ)
    kapK = dict(kapI)
    kapK.update(kapJ)
    alpha = tuple(sum(k[v] for k in kapK.values())
                  for v in range(corpus.quiver.n))
    bound = (system_degree_bound(_concat_poset(pI, pJ), kapK)
             + max([_pair_degree_bound(c)
                    for c in corpus.classes_of_dims(alpha)], default=0))
    pts = DEFAULT_SAMPLES if bound + 2 <= len(DEFAULT_SAMPLES) \
        else EXTENDED_SAMPLES
    if bound + 2 > len(pts):
        raise SizeBoundError("interleaving instance needs %d samples"
                             % (bound + 2,))
    pts = pts[:bound + 2]

    def sides(q):
        fI = system_pushforward(corpus, pI, kapI, sc, require,
                                mode="fixed-q", q=q)
        fJ = system_pushforward(corpus, pJ, kapJ, sc, require,
                                mode="fixed-q", q=q)
        lhs = hall_product(fI, fJ, corpus, mode="fixed-q", q=q)
        rhs = IsoClassFunction()
        for pK in posets:
            rhs = rhs + system_pushforward(corpus, pK, kapK, sc, require,
                                           mode="fixed-q", q=q)
        return lhs, rhs

    cache = {q: sides(q) for q in pts}
    failures = []
    checked = 0
    per_q = {q: {"lhs": cache[q][0], "rhs": cache[q][1]} for q in pts[:2]}
    for cls in corpus.classes_of_dims(alpha):
        lhs_chi = interpolate(lambda q, _l=cls.label: cache[q][0](_l),
                              bound, pts).at_one
        rhs_chi = interpolate(lambda q, _l=cls.label: cache[q][1](_l),
                              bound, pts).at_one
        checked += 1
        if lhs_chi != rhs_chi:
            failures.append({"label": repr(cls.label),
                             "lhs": lhs_chi, "rhs": rhs_chi})
    return _report(
        "best-product-interleaving", instance, "euler",
        {"classes": checked, "failing": len(failures),
         "interleavings": len(posets)},
        {"classes": checked, "failing": 0, "interleavings": len(posets)},
        not failures, per_q=per_q, witnesses=failures[:3])


def _run_best_refinement_sum(instance, n_fn=None):
    fn = n_fn if n_fn is not None else n_coeff
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    pspec = instance.get("poset", [2, [[1, 2]]])
    poset = _poset_from_spec(pspec)
    kap = _kappa_from_spec(poset, instance.get(
        "kappa", [[1, 0], [0, 1]][:len(poset.labels)]))
    require = tuple(instance.get("require", ()))
    qs = tuple(instance.get("qs", (2, 3)))
    failures = []
    checked = 0
    for q in qs:
        plain = system_pushforward(corpus, poset, kap, sc, require,
                                   mode="fixed-q", q=q)
        total = IsoClassFunction()
        inverse = IsoClassFunction()
        for finer in ps.orders_dominated_by(poset):
            kap_f = {i: kap[i] for i in finer.labels}
            best_req = tuple(sorted(set(require) | {"best"}))
            total = total + system_pushforward(
                corpus, finer, kap_f, sc, best_req, mode="fixed-q", q=q)
            inverse = inverse + system_pushforward(
                corpus, finer, kap_f, sc, require,
                mode="fixed-q", q=q).scale(Fraction(fn(finer, poset)))
        best_here = system_pushforward(
            corpus, poset, kap, sc,
            tuple(sorted(set(require) | {"best"})), mode="fixed-q", q=q)
        checked += 2
        if plain != total:
            failures.append({"q": q, "side": "sum", "lhs": plain,
                             "rhs": total})
        if best_here != inverse:
            failures.append({"q": q, "side": "inverse", "lhs": best_here,
                             "rhs": inverse})
    return _report(
        "best-refinement-sum", instance, "fixed-q",
        {"cases": checked, "failing": len(failures)},
        {"cases": checked, "failing": 0},
        not failures, witnesses=failures[:3])


def _run_one_point_evaluation(instance, n_fn=None):
    del n_fn
    nlabels = int(instance.get("labels", 3))
    qs = tuple(instance.get("qs", (2, 3)))
    labels = tuple(range(1, nlabels + 1))
    orders = list(ps.enumerate_partial_orders(labels))
    sc = st.trivial_condition()
    n = len(labels)
    kappa = {i: tuple(1 if v == labels.index(i) else 0 for v in range(n))
             for i in labels}
    failures = []
    cases = 0
    for q in qs:
        for wit in orders:
            X = cf.order_witness_rep(wit, q)
            wsig = frozenset(wit.strict_pairs)
            for idx in orders:
                got_best = count_systems(X, idx, kappa, sc,
                                         ("best", "st", "si", "ss"))
                want_best = 1 if frozenset(idx.strict_pairs) == wsig else 0
                got_plain = count_systems(X, idx, kappa, sc, ("st",))
                want_plain = (1 if ps.dominates(idx, wit) is not None
                              else 0)
                cases += 2
                if got_best != want_best or got_plain != want_plain:
                    failures.append({
                        "q": q,
                        "witness": sorted(map(list, wit.strict_pairs)),
                        "index": sorted(map(list, idx.strict_pairs)),
                        "best": [got_best, want_best],
                        "plain": [got_plain, want_plain],
                    })
    # one-dimensional classes: all four indicator functions coincide
    quiver = dense_loop_quiver(nlabels)
    for v in range(nlabels):
        alpha = tuple(1 if u == v else 0 for u in range(nlabels))
        entries = qv.enumerate_reps(quiver, alpha, 2)
        cases += 1
        if len(entries) != 1:
            failures.append({"vertex": v + 1,
                             "classes": len(entries)})
    return _report(
        "one-point-evaluation", instance, "fixed-q",
        {"cases": cases, "failing": len(failures)},
        {"cases": cases, "failing": 0},
        not failures, witnesses=failures[:5])


def _run_witness_evaluation_rank(instance, n_fn=None):
    del n_fn
    nlabels = int(instance.get("labels", 3))
    qs = tuple(instance.get("qs", (2,)))
    seq_n = int(instance.get("sequence_vertices", 2))
    seq_len = int(instance.get("sequence_length", 3))
    failures = []
    dets = {}
    for q in qs:
        orders, mat = order_witness_matrix(nlabels, q)
        det = _fraction_det(mat)
        dets["orders@q=%d" % q] = det
        if det == 0:
            failures.append({"q": q, "matrix": "orders", "det": 0})
        ident = all(mat[i][j] == (1 if i == j else 0)
                    for i in range(len(mat)) for j in range(len(mat)))
        if not ident:
            failures.append({"q": q, "matrix": "orders",
                             "identity": False})
        seqs, smat = sequence_witness_matrix(seq_n, seq_len, q)
        sident = all(smat[i][j] == (1 if i == j else 0)
                     for i in range(len(smat)) for j in range(len(smat)))
        dets["sequences@q=%d" % q] = 1 if sident else 0
        if not sident:
            bad = [(list(seqs[i]), list(seqs[j]), smat[i][j])
                   for i in range(len(smat)) for j in range(len(smat))
                   if smat[i][j] != (1 if i == j else 0)]
            failures.append({"q": q, "matrix": "sequences",
                             "bad": bad[:5]})
    return _report(
        "witness-evaluation-rank", instance, "fixed-q",
        {"nonsingular": not failures, "dets": dets},
        {"nonsingular": True},
        not failures, witnesses=failures[:5])


def _run_chain_pushforward_match(instance, n_fn=None):
    del n_fn
    corpus = _corpus_from_instance(instance)
    sc = _instance_sc(instance, corpus.quiver)
    comp = [tuple(c) for c in instance.get(
        "composition", [[1, 0], [0, 1]])]
    qs = tuple(instance.get("qs", (2, 3)))
    labels = tuple(range(1, len(comp) + 1))
    chain = ps.chain(labels)
    kappa = {i: comp[k] for k, i in enumerate(labels)}
    failures = []
    cases = 0
    for q in qs:
        parts = [delta_ss(corpus, beta, sc, mode="fixed-q", q=q)
                 for beta in comp]
        prod = product_fold(parts, corpus, hall_product, mode="fixed-q",
                            q=q)
        push = system_pushforward(corpus, chain, kappa, sc, ("ss",),
                                  mode="fixed-q", q=q)
        cases += 1
        if prod != push:
            failures.append({"q": q, "product": prod, "systems": push})
    return _report(
        "chain-pushforward-match", instance, "fixed-q",
        {"cases": cases, "failing": len(failures)},
        {"cases": cases, "failing": 0},
        not failures, witnesses=failures[:3])


IDENTITIES = {
    "order-chain-inversion": {
        "statement": "Signed chain counts between two comparable orders "
                     "sum to zero unless the orders coincide (both "
                     "summation variants).",
        "runner": _run_order_chain_inversion,
        "defaults": {"labels": 3},
    },
    "collapse-inversion": {
        "statement": "Coefficients attached to allowable label collapses "
                     "invert the refinement sum.",
        "runner": _run_collapse_inversion,
        "defaults": {"labels": 3, "targets": 2},
    },
    "collapse-product-rule": {
        "statement": "Collapse coefficients multiply along composed "
                     "allowable collapses.",
        "runner": _run_collapse_product,
        "defaults": {"labels": 3, "targets": 2},
    },
    "split-decomposition-count": {
        "statement": "The interpolated Euler number of Aut(sum of stable "
                     "pieces) modulo the piece automorphisms equals the "
                     "product of the multiplicity factorials.",
        "runner": _run_split_decomposition_count,
        "defaults": {"quiver": "a2", "pieces": "simple", "mults": [2, 1]},
    },
    "stable-flag-count-subset": {
        "statement": "Summed over orders keeping marked labels minimal "
                     "and over class assignments, the Euler number of "
                     "best stable systems is (n-a)! k!/(k-a)!.",
        "runner": _run_stable_flag_subset,
        "defaults": {"quiver": "a2", "pieces": "simple", "mults": [2, 1]},
    },
    "stable-flag-count-exact": {
        "statement": "With the marked labels exactly the minimal ones the "
                     "total is (n-k)! k! when a = k and zero when a < k.",
        "runner": _run_stable_flag_exact,
        "defaults": {"quiver": "a2", "pieces": "simple", "mults": [2, 1]},
    },
    "stable-flag-count-total": {
        "statement": "Summed over all orders and class assignments the "
                     "Euler number of best stable systems is n!.",
        "runner": _run_stable_flag_total,
        "defaults": {"quiver": "a2", "pieces": "simple", "mults": [2, 1]},
    },
    "stable-marking-count": {
        "statement": "Euler numbers of tuples of stable subobjects in "
                     "general position fall as k!/(k-a)!.",
        "runner": _run_stable_marking,
        "defaults": {"quiver": "a2", "pieces": "simple", "mults": [2, 1]},
    },
    "split-into-indecomposables": {
        "statement": "The semistable indicator is the split-product "
                     "exponential of the semistable indecomposable "
                     "indicator (weights 1/n! over equal-value ordered "
                     "decompositions).",
        "runner": _run_split_into_indecomposables,
        "defaults": {"quiver": "loop", "max_total": 4,
                     "stability": "trivial"},
    },
    "semistable-split-log": {
        "statement": "The semistable indecomposable indicator is the "
                     "split-product logarithm of the semistable indicator "
                     "(weights (-1)^(n-1)/n).",
        "runner": _run_semistable_split_log,
        "defaults": {"quiver": "loop", "max_total": 4,
                     "stability": "trivial"},
    },
    "composition-inverse-pair": {
        "statement": "The alternating transform of the semistable "
                     "indicators and the factorial-weighted sum of its "
                     "products invert each other, exactly over each "
                     "field and after interpolation.",
        "runner": _run_composition_inverse_pair,
        "defaults": {"quiver": "a2", "max_total": 4,
                     "stability": "slope c=1:2,2:1 r=1:1,2:1"},
    },
    "indecomposable-support": {
        "statement": "The alternating transform vanishes on decomposable "
                     "classes and equals one on stable classes.",
        "runner": _run_indecomposable_support,
        "defaults": {"quiver": "a2", "max_total": 4,
                     "stability": "slope c=1:2,2:1 r=1:1,2:1"},
    },
    "product-concatenation": {
        "statement": "The convolution of two system pushforwards is the "
                     "pushforward over the concatenated order (first "
                     "factor entirely below the second).",
        "runner": _run_product_concatenation,
        "defaults": {"quiver": "a2"},
    },
    "best-product-interleaving": {
        "statement": "The convolution of two best-system pushforwards is "
                     "the sum of best-system pushforwards over all "
                     "interleaving orders.",
        "runner": _run_best_product_interleaving,
        "defaults": {"quiver": "a2"},
    },
    "best-refinement-sum": {
        "statement": "Plain system counts split as sums of best system "
                     "counts over refining orders, and the signed chain "
                     "coefficients invert the sum.",
        "runner": _run_best_refinement_sum,
        "defaults": {"quiver": "a2", "poset": [2, [[1, 2]]]},
    },
    "one-point-evaluation": {
        "statement": "On the order-remembering witness the best stable "
                     "system count is one exactly at its own order; plain "
                     "counts appear exactly at refining index orders; "
                     "one-dimensional classes are unique.",
        "runner": _run_one_point_evaluation,
        "defaults": {"labels": 3, "qs": [2, 3]},
    },
    "witness-evaluation-rank": {
        "statement": "Witness evaluation tables are identity matrices "
                     "(hence invertible): best stable system counts over "
                     "all index orders, and chain counts over recorded "
                     "sequences.",
        "runner": _run_witness_evaluation_rank,
        "defaults": {"labels": 3, "qs": [2], "sequence_vertices": 2,
                     "sequence_length": 3},
    },
    "chain-pushforward-match": {
        "statement": "Iterated convolution of semistable indicators "
                     "evaluates to the semistable system count over the "
                     "total order with those jumps.",
        "runner": _run_chain_pushforward_match,
        "defaults": {"quiver": "a2", "stability": "slope c=1:2,2:1 r=1:1,2:1",
                     "composition": [[1, 0], [0, 1]]},
    },
}


def identity_ids():
    return sorted(IDENTITIES)


def run_identity_check(identity_id, instance=None, n_fn=None):
    """Run one registered identity check and return its report dict."""
    if identity_id not in IDENTITIES:
        raise InputError("unknown identity %r (known: %s)"
                         % (identity_id, ", ".join(identity_ids())))
    entry = IDENTITIES[identity_id]
    merged = dict(entry["defaults"])
    if instance:
        merged.update(instance)
    return entry["runner"](merged, n_fn=n_fn)
