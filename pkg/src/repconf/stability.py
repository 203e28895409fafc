"""Stability data for quiver representations.

A stability rule assigns an ordered value to every nonzero dimension
vector: a rational slope c(alpha)/r(alpha), a user-supplied monic
polynomial per class (compared by the "higher degree comes first, then
eventual pointwise" order), or the trivial rule where every class ties.
On top of the comparator sit the object-level notions: semistable /
stable classification, the canonical strictly-descending filtration
with semistable factors, and refinement of a semistable object into
stable factors of equal value.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, UnsupportedError
from .gf import left_kernel
from . import quiver as qv
from .quiver import (
    subobjects, sub_rep, quotient_rep, family_dims, family_leq,
    class_key, zero_family, full_family,
)

__all__ = [
    "PolyValue", "compare_polynomial_order", "compare_values",
    "StabilityCondition", "slope_condition", "trivial_condition",
    "polyorder_condition", "parse_stability",
    "classify", "is_semistable", "check_seesaw", "class_splittings",
    "HNFiltration", "hn_filtration", "section_factor",
    "stable_refinement", "dominates_sc", "all_classes",
    "equal_slope_splittings",
]


# --------------------------------------------------------------------------
# ordered values
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyValue:
    """A monic polynomial with exact rational coefficients, ascending
    order (index k holds the t^k coefficient)."""

    coeffs: tuple

    def __init__(self, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not coeffs or coeffs[-1] != 1:
            raise InputError(
                "ordered polynomial values must be monic, got %r"
                % (coeffs,))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __repr__(self):
        return "PolyValue(%s)" % (", ".join(str(c) for c in self.coeffs))


def compare_values(a, b):
    """-1, 0, or +1 in the stability order.

    Rationals compare as usual.  Monic polynomials compare by "smaller
    iff higher degree", then lexicographically from the top coefficient
    down (which is the eventual pointwise order at equal degree).
    Mixing the two kinds is an error.
    """
    a_poly = isinstance(a, PolyValue)
    b_poly = isinstance(b, PolyValue)
    if a_poly != b_poly:
        raise InputError("cannot compare a rational slope with a "
                         "polynomial order value")
    if not a_poly:
        a = Fraction(a)
        b = Fraction(b)
        return (a > b) - (a < b)
    if a.degree != b.degree:
        # higher degree sorts first
        return -1 if a.degree > b.degree else 1
    for x, y in zip(reversed(a.coeffs), reversed(b.coeffs)):
        if x != y:
            return -1 if x < y else 1
    return 0


def compare_polynomial_order(p, r):
    """The polynomial-variant comparator, accepting PolyValue or raw
    ascending coefficient sequences."""
    if not isinstance(p, PolyValue):
        p = PolyValue(p)
    if not isinstance(r, PolyValue):
        r = PolyValue(r)
    return compare_values(p, r)


# --------------------------------------------------------------------------
# stability conditions
# --------------------------------------------------------------------------

class StabilityCondition:
    """kind 'slope' (c, r vectors of rationals, r positive on classes),
    'trivial' (every class ties), or 'polyorder' (explicit class ->
    monic-polynomial table)."""

    __slots__ = ("kind", "c", "r", "table")

    def __init__(self, kind, c=None, r=None, table=None):
        if kind not in ("slope", "trivial", "polyorder"):
            raise InputError("unknown stability kind %r" % (kind,))
        if kind == "slope":
            c = tuple(Fraction(x) for x in c)
            r = tuple(Fraction(x) for x in r)
            if len(c) != len(r):
                raise InputError("slope vectors c and r disagree in length")
            if any(x <= 0 for x in r):
                raise InputError("slope denominators must be positive "
                                 "on every vertex")
        if kind == "polyorder":
            table = {tuple(int(d) for d in k):
                     (v if isinstance(v, PolyValue) else PolyValue(v))
                     for k, v in dict(table).items()}
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "table", table)

    def __setattr__(self, *a):
        raise AttributeError("StabilityCondition is immutable")

    def tau(self, alpha):
        alpha = tuple(int(d) for d in alpha)
        if any(d < 0 for d in alpha) or not any(alpha):
            raise InputError("classes are nonzero nonnegative vectors, "
                             "got %r" % (alpha,))
        if self.kind == "trivial":
            return Fraction(0)
        if self.kind == "slope":
            if len(alpha) != len(self.c):
                raise InputError("class %r does not match the slope "
                                 "vectors" % (alpha,))
            num = sum(ci * ai for ci, ai in zip(self.c, alpha))
            den = sum(ri * ai for ri, ai in zip(self.r, alpha))
            return Fraction(num, den)
        try:
            return self.table[alpha]
        except KeyError:
            raise InputError("no polynomial assigned to class %r"
                             % (alpha,))

    def compare(self, alpha, beta):
        return compare_values(self.tau(alpha), self.tau(beta))

    def __repr__(self):
        if self.kind == "slope":
            return "StabilityCondition(slope, c=%r, r=%r)" % (
                tuple(str(x) for x in self.c),
                tuple(str(x) for x in self.r))
        return "StabilityCondition(%s)" % self.kind


def slope_condition(c, r):
    return StabilityCondition("slope", c=c, r=r)


def trivial_condition():
    return StabilityCondition("trivial")


def polyorder_condition(table):
    return StabilityCondition("polyorder", table=table)


def parse_stability(text, quiver, read_file=None):
    """Parse the stability file format::

        slope c=1:1,2:0 r=1:1,2:1
        trivial
        polyorder file=<path>

    Slope entries are <vertex label>:<rational> pairs and must cover
    every vertex.  ``read_file`` resolves the polyorder path to its
    text (defaults to opening it relative to the working directory).
    """
    line = None
    lineno = 0
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            if line is not None:
                raise InputError("line %d: stability file has more than "
                                 "one directive" % no)
            line, lineno = stripped, no
    if line is None:
        raise InputError("stability file is empty")
    parts = line.split()
    if parts[0] == "trivial":
        if len(parts) != 1:
            raise InputError("line %d: 'trivial' takes no arguments"
                             % lineno)
        return trivial_condition()
    if parts[0] == "slope":
        vecs = {}
        for part in parts[1:]:
            if "=" not in part:
                raise InputError("line %d: expected c=... and r=..."
                                 % lineno)
            name, body = part.split("=", 1)
            if name not in ("c", "r") or name in vecs:
                raise InputError("line %d: unexpected slope field %r"
                                 % (lineno, name))
            entries = {}
            for item in body.split(","):
                if ":" not in item:
                    raise InputError(
                        "line %d: slope entries are <vertex>:<rational>"
                        % lineno)
                label, val = item.split(":", 1)
                try:
                    entries[label] = Fraction(val)
                except (ValueError, ZeroDivisionError):
                    raise InputError("line %d: bad rational %r"
                                     % (lineno, val))
            vecs[name] = entries
        if set(vecs) != {"c", "r"}:
            raise InputError("line %d: slope needs both c= and r="
                             % lineno)
        for name, entries in vecs.items():
            if set(entries) != set(quiver.vertices):
                raise InputError(
                    "line %d: %s= must assign every vertex of the quiver"
                    % (lineno, name))
        c = tuple(vecs["c"][v] for v in quiver.vertices)
        r = tuple(vecs["r"][v] for v in quiver.vertices)
        return slope_condition(c, r)
    if parts[0] == "polyorder":
        if len(parts) != 2 or not parts[1].startswith("file="):
            raise InputError("line %d: expected 'polyorder file=<path>'"
                             % lineno)
        path = parts[1][len("file="):]
        if read_file is None:
            with open(path, "r", encoding="utf-8") as fh:
                body = fh.read()
        else:
            body = read_file(path)
        return polyorder_condition(parse_polyorder_table(body, quiver))
    raise InputError("line %d: unknown stability kind %r"
                     % (lineno, parts[0]))


def parse_polyorder_table(text, quiver):
    """Table lines: ``<d1>,<d2>,... : <c0> <c1> ...`` with ascending
    rational coefficients; each polynomial must be monic."""
    table = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise InputError("line %d: expected '<dims> : <coefficients>'"
                             % lineno)
        left, right = line.split(":", 1)
        try:
            dims = tuple(int(x) for x in left.strip().split(","))
        except ValueError:
            raise InputError("line %d: bad dimension vector" % lineno)
        if len(dims) != quiver.n:
            raise InputError("line %d: dimension vector has %d entries, "
                             "quiver has %d vertices"
                             % (lineno, len(dims), quiver.n))
        try:
            coeffs = [Fraction(x) for x in right.split()]
        except (ValueError, ZeroDivisionError):
            raise InputError("line %d: bad coefficient" % lineno)
        table[dims] = PolyValue(coeffs)
    if not table:
        raise InputError("polyorder table is empty")
    return table


# --------------------------------------------------------------------------
# seesaw classification of a condition
# --------------------------------------------------------------------------

def class_splittings(alpha):
    """All ordered componentwise splittings alpha = beta + gamma with
    both parts nonzero."""
    alpha = tuple(alpha)
    out = []
    for beta in itertools.product(*[range(a + 1) for a in alpha]):
        if not any(beta):
            continue
        gamma = tuple(a - b for a, b in zip(alpha, beta))
        if not any(gamma):
            continue
        out.append((beta, gamma))
    return out


def check_seesaw(sc, triples):
    """Classify a condition on sampled splittings beta + gamma = alpha:
    'stability' when the strict trichotomy holds throughout, 'weak-only'
    when only the weak version does, else 'neither'."""
    all_strict = True
    all_weak = True
    for beta, gamma in triples:
        alpha = tuple(b + g for b, g in zip(beta, gamma))
        cb = compare_values(sc.tau(beta), sc.tau(alpha))
        cg = compare_values(sc.tau(alpha), sc.tau(gamma))
        strict = (cb < 0 and cg < 0) or (cb > 0 and cg > 0) or \
                 (cb == 0 and cg == 0)
        weak = (cb <= 0 and cg <= 0) or (cb >= 0 and cg >= 0)
        if not strict:
            all_strict = False
        if not weak:
            all_weak = False
            break
    if all_strict:
        return "stability"
    return "weak-only" if all_weak else "neither"


def all_classes(nvertices, bound):
    """Nonzero dimension vectors with total at most the bound."""
    out = []
    for vec in itertools.product(range(bound + 1), repeat=nvertices):
        if 0 < sum(vec) <= bound:
            out.append(vec)
    return out


# --------------------------------------------------------------------------
# object classification
# --------------------------------------------------------------------------

def classify(X, sc):
    """'stable', 'semistable-not-stable', or 'unstable': scans every
    proper nonzero subobject S and compares tau([S]) with tau([X/S])."""
    if X.total_dim == 0:
        raise InputError("the zero object has no stability class")
    total = X.total_dim
    saw_tie = False
    for fam in subobjects(X):
        sdims = family_dims(fam)
        sd = sum(sdims)
        if sd == 0 or sd == total:
            continue
        qdims = tuple(d - s for d, s in zip(X.dims, sdims))
        c = sc.compare(sdims, qdims)
        if c > 0:
            return "unstable"
        if c == 0:
            saw_tie = True
    return "semistable-not-stable" if saw_tie else "stable"


def is_semistable(X, sc):
    return classify(X, sc) != "unstable"


# --------------------------------------------------------------------------
# the canonical descending filtration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HNFiltration:
    """Ascending chain of subobject families 0 = A_0 < ... < A_n = X
    with semistable factors of strictly descending value."""

    rep: object
    families: tuple
    factor_reps: tuple
    tau_values: tuple

    @property
    def length(self):
        return len(self.factor_reps)

    @property
    def factor_keys(self):
        return tuple(class_key(f) for f in self.factor_reps)


def _family_preimage(F, proj_mats, fam, src_dims, dst_dims):
    """Per-vertex preimage of a row-space family under a projection."""
    out = []
    for v in range(len(src_dims)):
        d, e = src_dims[v], dst_dims[v]
        if d == 0:
            out.append(())
            continue
        tester = qv._quotient_test_matrix(F, fam[v], e)
        comp = qv._mul(F, proj_mats[v], tester, d, e,
                       len(tester[0]) if tester and tester[0] else 0)
        if not comp or not comp[0]:
            out.append(tuple(qv.identity_matrix(d)))
        else:
            out.append(left_kernel(F, comp, nrows=d))
    return tuple(out)


def section_factor(X, inner, outer):
    """The factor object (outer family) / (inner family)."""
    F = X.F
    if not family_leq(F, inner, outer):
        raise InputError("factor requires nested families")
    S, _ = sub_rep(X, outer)
    inner_in_S = tuple(
        tuple(qv.coords(F, outer[v], u) for u in inner[v])
        for v in range(len(outer)))
    Q, _ = quotient_rep(S, inner_in_S)
    return Q


def _max_semistable_layer(X, sc):
    """The unique largest semistable subobject attaining the maximal
    value; asserts containment of every other candidate."""
    F = X.F
    best_tau = None
    for fam in subobjects(X):
        if sum(family_dims(fam)) == 0:
            continue
        t = sc.tau(family_dims(fam))
        if best_tau is None or compare_values(t, best_tau) > 0:
            best_tau = t
    candidates = []
    for fam in subobjects(X):
        sdims = family_dims(fam)
        if sum(sdims) == 0:
            continue
        if compare_values(sc.tau(sdims), best_tau) != 0:
            continue
        S, _ = sub_rep(X, fam)
        if is_semistable(S, sc):
            candidates.append(fam)
    assert candidates, "a maximal semistable layer always exists"
    top = max(candidates, key=lambda fam: sum(family_dims(fam)))
    for fam in candidates:
        assert family_leq(F, fam, top), \
            "maximal semistable layer is not unique"
    return top, best_tau


def hn_filtration(X, sc):
    """The unique ascending filtration with semistable factors of
    strictly descending value, built by repeatedly splitting off the
    maximal layer."""
    if X.total_dim == 0:
        raise InputError("the zero object has no canonical filtration")
    F = X.F
    families = [zero_family(X)]
    factors = []
    taus = []
    top, t = _max_semistable_layer(X, sc)
    families.append(top)
    factors.append(sub_rep(X, top)[0])
    taus.append(t)
    while family_dims(families[-1]) != tuple(X.dims):
        Q, proj = quotient_rep(X, families[-1])
        top_q, t = _max_semistable_layer(Q, sc)
        pre = _family_preimage(F, proj.mats, top_q, X.dims, Q.dims)
        families.append(pre)
        factors.append(section_factor(X, families[-2], pre))
        taus.append(t)
    for a, b in zip(taus, taus[1:]):
        assert compare_values(a, b) > 0, \
            "factor values must strictly descend"
    for f in factors:
        assert is_semistable(f, sc), "factors must be semistable"
    return HNFiltration(rep=X, families=tuple(families),
                        factor_reps=tuple(factors),
                        tau_values=tuple(taus))


# --------------------------------------------------------------------------
# stable refinement of a semistable object
# --------------------------------------------------------------------------

def _require_full_seesaw(sc, alpha):
    if sc.kind in ("slope", "trivial"):
        return
    verdict = check_seesaw(sc, class_splittings(alpha))
    if verdict != "stability":
        raise UnsupportedError(
            "stable refinement needs the strict seesaw property; this "
            "condition is %r on the splittings of %r" % (verdict, alpha))


def stable_refinement(X, sc):
    """Multiset of stable factors of equal value refining a semistable
    object, as (representative, multiplicity) pairs grouped by class
    key.  The factor multiset does not depend on the choices made."""
    if X.total_dim == 0:
        raise InputError("the zero object has no stable refinement")
    _require_full_seesaw(sc, X.dims)
    verdict = classify(X, sc)
    if verdict == "unstable":
        raise InputError("stable refinement needs a semistable object")
    pieces = []
    _stable_refine_into(X, sc, pieces)
    grouped = {}
    for piece in pieces:
        key = class_key(piece)
        if key in grouped:
            grouped[key][1] += 1
        else:
            grouped[key] = [piece, 1]
    out = [(rep, mult) for rep, mult in grouped.values()]
    out.sort(key=lambda pm: repr(class_key(pm[0])))
    return out


def _stable_refine_into(X, sc, acc):
    if classify(X, sc) == "stable":
        acc.append(X)
        return
    total = X.total_dim
    for fam in subobjects(X):  # canonical ascending order => determinism
        sdims = family_dims(fam)
        sd = sum(sdims)
        if sd == 0 or sd == total:
            continue
        if compare_values(sc.tau(sdims), sc.tau(X.dims)) != 0:
            continue
        S, _ = sub_rep(X, fam)
        if classify(S, sc) != "stable":
            continue
        acc.append(S)
        Q, _ = quotient_rep(X, fam)
        _stable_refine_into(Q, sc, acc)
        return
    raise AssertionError(
        "semistable object with no equal-value stable subobject")


# --------------------------------------------------------------------------
# domination and splitting enumeration
# --------------------------------------------------------------------------

def dominates_sc(candidate, other, classes):
    """Whether tau-comparisons under `other` all persist under
    `candidate` on the given classes."""
    classes = list(classes)
    for alpha in classes:
        for beta in classes:
            if compare_values(other.tau(alpha), other.tau(beta)) <= 0:
                if compare_values(candidate.tau(alpha),
                                  candidate.tau(beta)) > 0:
                    return False
    return True


def _semistable_locus_nonempty(quiver, alpha, sc, q):
    # keyed per condition object; keeping the reference pins its id
    ref, cache = _LOCUS_MEMO.setdefault(id(sc), (sc, {}))
    assert ref is sc
    key = (quiver, tuple(alpha), q)
    if key not in cache:
        cache[key] = any(classify(e.rep, sc) != "unstable"
                         for e in qv.enumerate_reps(quiver, alpha, q))
    return cache[key]


_LOCUS_MEMO = {}


def equal_slope_splittings(quiver, alpha, sc, q):
    """Ordered splittings alpha = beta + gamma with all three classes of
    equal value and both semistable loci nonempty over F_q."""
    out = []
    t_alpha = sc.tau(alpha)
    for beta, gamma in class_splittings(alpha):
        if compare_values(sc.tau(beta), t_alpha) != 0:
            continue
        if compare_values(sc.tau(gamma), t_alpha) != 0:
            continue
        if not _semistable_locus_nonempty(quiver, beta, sc, q):
            continue
        if not _semistable_locus_nonempty(quiver, gamma, sc, q):
            continue
        out.append((beta, gamma))
    return out
