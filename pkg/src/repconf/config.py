"""Order-indexed systems of subquotients of a quiver representation.

The data: a finite poset, one representation attached to every
order-convex index set, an inclusion morphism for each nested pair
whose small member is downward-closed inside the big one, and a
projection for each nested pair whose small member is upward-closed.
The axioms: inclusion of J into K followed by projection onto K minus J
is a short exact sequence, inclusions compose, projections compose, and
the mixed composites agree.

Over a fixed ambient representation X such a system is equivalent to a
map from the lower sets of the poset to subobjects of X sending the
empty set to 0, the full index set to X, unions to sums, and
intersections to intersections.  That equivalence carries the workload
here: enumeration, counting and symmetry-group actions all run on the
subobject side, while ``validate`` independently re-checks the axioms
on the explicit matrix data, so constructed systems are verified twice
by genuinely different routes.
"""

import itertools

from .errors import InputError, SizeBoundError
from .gf import complete_basis, coords, express_in_rows, mat_mul, span
from . import posets as ps
from . import quiver as qv
from .quiver import (
    Quiver, QuiverRep, RepMorphism, subobjects,
    family_dims, family_eq, family_leq, family_sum, family_intersect,
    full_family, zero_family, class_key, aut_order, hom_space,
)
from . import stability as st

__all__ = [
    "Configuration", "ValidationResult", "validate",
    "build_configuration", "from_flag", "ambient_rep", "ambient_families",
    "kappa_of", "subconfiguration", "quotient_configuration", "coarsen",
    "is_best", "improvements", "split_pairs",
    "iter_config_families", "config_families", "count_config_families",
    "principal_factors", "ConfigModuliPoint", "enumerate_config_moduli",
    "unit_group", "order_witness_rep",
    "config_to_payload", "config_from_payload",
    "DEFAULT_AUT_BUDGET",
]

DEFAULT_AUT_BUDGET = 300_000


# --------------------------------------------------------------------------
# the container
# --------------------------------------------------------------------------

class Configuration:
    """Explicit matrix data: sigma maps order-convex sets to
    representations, iota the downward-closed nested pairs to inclusions,
    pi the upward-closed nested pairs to projections.

    Instances built over an ambient representation keep the subobject
    lattice around (``ambient_rep`` / ``ambient_families``); instances
    restored from a payload carry only the explicit data, which is all
    that ``validate`` looks at.
    """

    __slots__ = ("poset", "sigma", "iota", "pi", "_ambient", "_families")

    def __init__(self, poset, sigma, iota, pi, ambient=None, families=None):
        self.poset = poset
        self.sigma = {frozenset(J): R for J, R in sigma.items()}
        self.iota = {(frozenset(J), frozenset(K)): m
                     for (J, K), m in iota.items()}
        self.pi = {(frozenset(J), frozenset(K)): m
                   for (J, K), m in pi.items()}
        self._ambient = ambient
        self._families = dict(families) if families is not None else None

    @property
    def quiver(self):
        return self.top.quiver

    @property
    def q(self):
        return self.top.q

    @property
    def top(self):
        """The representation attached to the full index set."""
        return self.sigma[frozenset(self.poset.labels)]

    def data_key(self):
        """Hashable tuple of all the matrix data, used for equality."""
        p = self.poset
        fparts = []
        for J in p.sort_subsets(p.f_sets):
            R = self.sigma[J]
            fparts.append((tuple(sorted(J)), R.dims, R.maps))
        gparts = []
        for (J, K) in self.iota:
            gparts.append((tuple(sorted(J)), tuple(sorted(K)),
                           self.iota[(J, K)].mats))
        hparts = []
        for (J, K) in self.pi:
            hparts.append((tuple(sorted(J)), tuple(sorted(K)),
                           self.pi[(J, K)].mats))
        return (tuple(p.labels), tuple(sorted(p.strict_pairs)),
                tuple(fparts), tuple(sorted(gparts)), tuple(sorted(hparts)))

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.data_key() == other.data_key()

    def __hash__(self):
        return hash(self.data_key())

    def __repr__(self):
        return "Configuration(|I|=%d, top dims %r)" % (
            self.poset.n, self.top.dims)


def kappa_of(c):
    """Per-index class map: label -> dimension vector of sigma({label}).

    Additivity over every order-convex set is a consequence of the
    exactness axiom and is exercised in the tests, not assumed here.
    """
    return {i: c.sigma[frozenset({i})].dims for i in c.poset.labels}


def ambient_rep(c):
    """The ambient representation the system lives in (= sigma of the
    full index set)."""
    if c._ambient is not None:
        return c._ambient
    return c.top


def ambient_families(c):
    """Recover the lower-set-to-subobject map from the explicit data.

    For a lower set A the subobject is the image of the inclusion of A
    into the full index set.
    """
    if c._families is not None:
        return dict(c._families)
    X = ambient_rep(c)
    F = X.F
    full = frozenset(c.poset.labels)
    fams = {}
    for A in c.poset.lower_sets:
        mats = c.iota[(A, full)].mats
        fams[A] = tuple(span(F, mats[v], n=X.dims[v])
                        for v in range(X.quiver.n))
    return fams


# --------------------------------------------------------------------------
# subobject-family plumbing
# --------------------------------------------------------------------------

def _is_subobject_family(X, fam):
    F = X.F
    for a in range(len(X.quiver.arrows)):
        s, t = X.quiver.arrow_endpoints(a)
        M = X.map_for(a)
        for w in fam[s]:
            wa = qv._apply(F, w, M, X.dims[t])
            if X.dims[t] == 0:
                continue
            if not fam[t]:
                if any(wa):
                    return False
            elif express_in_rows(F, fam[t], wa) is None:
                return False
    return True


def _canonical_family(X, fam):
    F = X.F
    return tuple(span(F, tuple(fam[v]), n=X.dims[v])
                 for v in range(X.quiver.n))


def _complete_families(X, poset, principal):
    """Extend a label -> subobject assignment to all lower sets by sums.

    Returns the completed dict, or None if any of the lattice conditions
    fail (principal consistency, full set hits X, intersections of lower
    sets match intersections of subobjects).
    """
    F = X.F
    dims = X.dims
    lows = poset.lower_sets
    fams = {}
    for A in lows:
        cur = zero_family(X)
        for i in A:
            cur = family_sum(F, cur, principal[i], dims)
        fams[A] = cur
    for i in poset.labels:
        if not family_eq(fams[poset.down_set(i)], principal[i]):
            return None
    if not family_eq(fams[frozenset(poset.labels)], full_family(X)):
        return None
    for A, B in itertools.combinations(lows, 2):
        cap = family_intersect(F, fams[A], fams[B], dims)
        if not family_eq(cap, fams[A & B]):
            return None
    return fams


def iter_config_families(X, poset, kappa):
    """Yield every lower-set-to-subobject map on (X, poset) whose
    principal subquotients have the classes prescribed by kappa.

    kappa maps each label to a dimension vector; the subobject attached
    to the principal lower set of a label is forced to have the summed
    dimension vector of everything at or below it, which prunes the
    search hard.  Yields completed dicts keyed by lower sets.
    """
    kap = {i: tuple(kappa[i]) for i in poset.labels}
    total = tuple(sum(k[v] for k in kap.values())
                  for v in range(X.quiver.n))
    if total != X.dims:
        return
    F = X.F
    by_dims = {}
    for fam in subobjects(X):
        by_dims.setdefault(family_dims(fam), []).append(fam)
    # any linear extension works: strictly smaller ideals come first
    topo = sorted(poset.labels, key=lambda a: (len(poset.down_set(a)), str(a)))
    need = {}
    for i in poset.labels:
        ds = poset.down_set(i)
        need[i] = tuple(sum(kap[j][v] for j in ds)
                        for v in range(X.quiver.n))

    def rec(k, chosen):
        if k == len(topo):
            full = _complete_families(X, poset, chosen)
            if full is not None:
                yield full
            return
        i = topo[k]
        base = zero_family(X)
        for j in poset.down_set(i):
            if j != i:
                base = family_sum(F, base, chosen[j], X.dims)
        for fam in by_dims.get(need[i], ()):
            if family_leq(F, base, fam):
                chosen[i] = fam
                yield from rec(k + 1, chosen)
                del chosen[i]

    yield from rec(0, {})


def config_families(X, poset, kappa):
    return list(iter_config_families(X, poset, kappa))


def count_config_families(X, poset, kappa, predicate=None):
    """Number of lower-set systems, optionally filtered by a predicate
    on the completed family dict."""
    n = 0
    for fams in iter_config_families(X, poset, kappa):
        if predicate is None or predicate(fams):
            n += 1
    return n


# --------------------------------------------------------------------------
# building the explicit data from a subobject lattice
# --------------------------------------------------------------------------

def _factor_coords(F, low_rows, lift_rows, w):
    """Coordinates of w in the factor spanned by lift_rows modulo
    span(low_rows)."""
    if not lift_rows:
        return ()
    basis = tuple(low_rows) + tuple(lift_rows)
    full = coords(F, basis, w)
    return full[len(low_rows):]


class _FactorData:
    """One order-convex set's subquotient: the factor representation
    plus the lift rows realizing its basis inside the ambient space."""

    __slots__ = ("rep", "lift", "low_set", "high_set")

    def __init__(self, X, poset, fams, J):
        F = X.F
        n = X.quiver.n
        dc = poset.down_closure(J)
        lowset = dc - J
        low = fams[lowset]
        high = fams[dc]
        lift = tuple(complete_basis(F, low[v], high[v]) for v in range(n))
        dims = tuple(len(lift[v]) for v in range(n))
        maps = []
        for a in range(len(X.quiver.arrows)):
            s, t = X.quiver.arrow_endpoints(a)
            rows = []
            for w in lift[s]:
                wa = qv._apply(F, w, X.map_for(a), X.dims[t])
                rows.append(_factor_coords(F, low[t], lift[t], wa))
            maps.append(tuple(rows))
        self.rep = QuiverRep(X.quiver, X.q, dims, tuple(maps))
        self.lift = lift
        self.low_set = lowset
        self.high_set = dc

    def project(self, F, fams, v, w):
        """Coordinates in this factor of an ambient vector w lying in
        the subobject of the closure."""
        return _factor_coords(F, fams[self.low_set][v], self.lift[v], w)


def build_configuration(X, poset, families):
    """Assemble the full explicit system over X from a subobject
    assignment.

    ``families`` maps labels to subobject families (one per principal
    lower set) or lower sets to families; either way the completed
    lattice must satisfy the sum/intersection conditions or InputError
    is raised.
    """
    F = X.F
    n = X.quiver.n
    if families and all(isinstance(k, frozenset) for k in families):
        principal = {i: families[poset.down_set(i)] for i in poset.labels}
    else:
        principal = {i: families[i] for i in poset.labels}
    principal = {i: _canonical_family(X, fam)
                 for i, fam in principal.items()}
    for i, fam in principal.items():
        if not _is_subobject_family(X, fam):
            raise InputError(
                "the subspaces assigned to %r are not closed under the "
                "arrow maps" % (i,))
    fams = _complete_families(X, poset, principal)
    if fams is None:
        raise InputError(
            "subobject assignment violates the lattice conditions "
            "(principal sums, full-set covering, or intersections)")

    factors = {J: _FactorData(X, poset, fams, J) for J in poset.f_sets}
    sigma = {J: fd.rep for J, fd in factors.items()}

    iota = {}
    for (J, K) in poset.g_pairs:
        fj, fk = factors[J], factors[K]
        mats = []
        for v in range(n):
            mats.append(tuple(fk.project(F, fams, v, w) for w in fj.lift[v]))
        iota[(J, K)] = RepMorphism(sigma[J], sigma[K], tuple(mats))

    pi = {}
    for (J, K) in poset.h_pairs:
        fj, fk = factors[J], factors[K]
        # split the closure of J as (closure of K) + D with D a lower set
        # meeting the closure of K only below K; the K-component of a
        # vector is then well defined modulo the part below K
        D = (poset.down_closure(J) - J) | poset.down_closure(J - K)
        mats = []
        for v in range(n):
            top_rows = fams[fk.high_set][v]
            stacked = tuple(top_rows) + tuple(fams[D][v])
            rows = []
            for w in fj.lift[v]:
                sol = express_in_rows(F, stacked, w)
                assert sol is not None, "closure sum must cover the lift"
                u = [0] * X.dims[v]
                for r, cf in enumerate(sol[:len(top_rows)]):
                    if cf:
                        for t, entry in enumerate(top_rows[r]):
                            u[t] = F.add(u[t], F.mul(cf, entry))
                rows.append(fk.project(F, fams, v, tuple(u)))
            mats.append(tuple(rows))
        pi[(J, K)] = RepMorphism(sigma[J], sigma[K], tuple(mats))

    return Configuration(poset, sigma, iota, pi, ambient=X, families=fams)


def from_flag(X, chain):
    """Total-order system from a filtration of X.

    ``chain`` lists subobject families from the zero family to the full
    one, strictly increasing; step k becomes the subquotient at label
    str(k) on the chain order 1 < 2 < ... < n.
    """
    fams = [_canonical_family(X, f) for f in chain]
    if not fams:
        raise InputError("a filtration needs at least the zero and full "
                         "subobjects")
    F = X.F
    if any(fams[0][v] for v in range(X.quiver.n)):
        raise InputError("filtration must start at the zero subobject")
    if not family_eq(fams[-1], full_family(X)):
        raise InputError("filtration must end at the full subobject")
    for k, fam in enumerate(fams):
        if not _is_subobject_family(X, fam):
            raise InputError("filtration step %d is not closed under the "
                             "arrow maps" % k)
        if k > 0:
            if not family_leq(F, fams[k - 1], fam):
                raise InputError("filtration steps must be nested")
            if family_eq(fams[k - 1], fam):
                raise InputError("filtration steps must be strict")
    nsteps = len(fams) - 1
    labels = tuple(str(k) for k in range(1, nsteps + 1))
    poset = ps.chain(labels)
    principal = {labels[k]: fams[k + 1] for k in range(nsteps)}
    return build_configuration(X, poset, principal)


# --------------------------------------------------------------------------
# the axiom checker (independent of construction)
# --------------------------------------------------------------------------

class ValidationResult:
    """Boolean-ish validation outcome carrying the first failure."""

    __slots__ = ("ok", "code", "detail")

    def __init__(self, ok, code=None, detail=""):
        self.ok = ok
        self.code = code
        self.detail = detail

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "ValidationResult(ok)"
        return "ValidationResult(%s: %s)" % (self.code, self.detail)


def _fail(code, detail):
    return ValidationResult(False, code, detail)


def _same_rep(a, b):
    return a.dims == b.dims and a.maps == b.maps


def _is_identity_mats(m):
    for v in range(m.source.quiver.n):
        d = m.source.dims[v]
        if m.target.dims[v] != d:
            return False
        mat = m.mats[v]
        for r in range(d):
            for col in range(d):
                if mat[r][col] != (1 if r == col else 0):
                    return False
    return True


def _zero_mats(m):
    return all(all(all(e == 0 for e in row) for row in mat)
               for mat in m.mats)


def _names(J):
    return "{%s}" % ",".join(sorted(J))


def validate(c):
    """Check the axioms on the explicit data; returns a boolean-ish
    result reporting the first failure.  Failures are data, not errors.

    Codes: (i) zero object at the empty set, (ii) inclusions injective
    with identity on equal pairs, (iii) projections surjective with
    identity on equal pairs, (A) exactness, (B) inclusion composition,
    (C) projection composition, (D) mixed commutation.
    """
    p = c.poset
    fsets = set(p.f_sets)
    for J in fsets:
        if J not in c.sigma:
            return _fail("malformed", "missing object at %s" % _names(J))
    empty = c.sigma.get(frozenset())
    if empty is None or empty.total_dim != 0:
        return _fail("(i)", "the empty index set must carry the zero "
                            "object")
    gpairs = p.g_pairs
    hpairs = p.h_pairs
    for (J, K) in gpairs:
        m = c.iota.get((J, K))
        if m is None:
            return _fail("malformed", "missing inclusion %s -> %s"
                         % (_names(J), _names(K)))
        if not (_same_rep(m.source, c.sigma[J])
                and _same_rep(m.target, c.sigma[K])):
            return _fail("malformed", "inclusion %s -> %s has wrong "
                         "endpoints" % (_names(J), _names(K)))
        if not m.is_injective():
            return _fail("(ii)", "inclusion %s -> %s is not injective"
                         % (_names(J), _names(K)))
        if J == K and not _is_identity_mats(m):
            return _fail("(ii)", "inclusion at %s is not the identity"
                         % _names(J))
    for (J, K) in hpairs:
        m = c.pi.get((J, K))
        if m is None:
            return _fail("malformed", "missing projection %s -> %s"
                         % (_names(J), _names(K)))
        if not (_same_rep(m.source, c.sigma[J])
                and _same_rep(m.target, c.sigma[K])):
            return _fail("malformed", "projection %s -> %s has wrong "
                         "endpoints" % (_names(J), _names(K)))
        if not m.is_surjective():
            return _fail("(iii)", "projection %s -> %s is not surjective"
                         % (_names(J), _names(K)))
        if J == K and not _is_identity_mats(m):
            return _fail("(iii)", "projection at %s is not the identity"
                         % _names(J))
    for (J, K) in gpairs:
        L = K - J
        m = c.pi.get((K, L))
        if m is None:
            return _fail("malformed", "missing projection %s -> %s"
                         % (_names(K), _names(L)))
        comp = c.iota[(J, K)].then(m)
        if not _zero_mats(comp):
            return _fail("(A)", "inclusion of %s then projection onto %s "
                         "is nonzero" % (_names(J), _names(L)))
        for v in range(c.sigma[K].quiver.n):
            if (c.sigma[J].dims[v] + c.sigma[L].dims[v]
                    != c.sigma[K].dims[v]):
                return _fail("(A)", "dimensions over %s do not add up"
                             % _names(K))
    g_by_src = {}
    for (J, K) in gpairs:
        g_by_src.setdefault(J, []).append(K)
    for (J, K) in gpairs:
        for L in g_by_src.get(K, ()):
            expected = c.iota.get((J, L))
            if expected is None:
                return _fail("malformed", "missing inclusion %s -> %s"
                             % (_names(J), _names(L)))
            comp = c.iota[(J, K)].then(c.iota[(K, L)])
            if comp.mats != expected.mats:
                return _fail("(B)", "inclusions %s -> %s -> %s do not "
                             "compose" % (_names(J), _names(K), _names(L)))
    h_by_src = {}
    for (J, K) in hpairs:
        h_by_src.setdefault(J, []).append(K)
    for (J, K) in hpairs:
        for L in h_by_src.get(K, ()):
            expected = c.pi.get((J, L))
            if expected is None:
                return _fail("malformed", "missing projection %s -> %s"
                             % (_names(J), _names(L)))
            comp = c.pi[(J, K)].then(c.pi[(K, L)])
            if comp.mats != expected.mats:
                return _fail("(C)", "projections %s -> %s -> %s do not "
                             "compose" % (_names(J), _names(K), _names(L)))
    for (J, K) in gpairs:
        for L in h_by_src.get(K, ()):
            M = J & L
            down = c.pi.get((J, M))
            up = c.iota.get((M, L))
            if down is None or up is None:
                return _fail("malformed", "missing route %s -> %s -> %s"
                             % (_names(J), _names(M), _names(L)))
            lhs = c.iota[(J, K)].then(c.pi[(K, L)])
            rhs = down.then(up)
            if lhs.mats != rhs.mats:
                return _fail("(D)", "mixed square %s -> %s -> %s does not "
                             "commute" % (_names(J), _names(K), _names(L)))
    return ValidationResult(True)


# --------------------------------------------------------------------------
# restriction and collapse
# --------------------------------------------------------------------------

def subconfiguration(c, J):
    """Restrict to an order-convex subset: every convex subset of J is
    convex in the whole index set, so the data is literally a subset."""
    J = frozenset(J)
    if J not in set(c.poset.f_sets):
        raise InputError("restriction target must be order-convex")
    keep = tuple(i for i in c.poset.labels if i in J)
    sub = c.poset.restrict(keep)
    sigma = {A: c.sigma[A] for A in sub.f_sets}
    iota = {(A, B): c.iota[(A, B)] for (A, B) in sub.g_pairs}
    pi = {(A, B): c.pi[(A, B)] for (A, B) in sub.h_pairs}
    return Configuration(sub, sigma, iota, pi)


def quotient_configuration(c, phi, target):
    """Collapse along a monotone surjection phi onto the target poset:
    the object at a target set is the object at its preimage."""
    p = c.poset
    if set(phi) != set(p.labels):
        raise InputError("the collapse map must be defined on every label")
    if set(phi.values()) != set(target.labels):
        raise InputError("the collapse map must cover the target labels")
    for i in p.labels:
        for j in p.labels:
            if p.leq(i, j) and not target.leq(phi[i], phi[j]):
                raise InputError(
                    "collapse map does not respect the orders at (%r, %r)"
                    % (i, j))

    def preim(B):
        return frozenset(i for i in p.labels if phi[i] in B)

    sigma = {B: c.sigma[preim(B)] for B in target.f_sets}
    iota = {(A, B): c.iota[(preim(A), preim(B))]
            for (A, B) in target.g_pairs}
    pi = {(A, B): c.pi[(preim(A), preim(B))]
          for (A, B) in target.h_pairs}
    fams = None
    if c._families is not None:
        fams = {B: c._families[preim(B)] for B in target.lower_sets}
    return Configuration(target, sigma, iota, pi,
                         ambient=c._ambient, families=fams)


def coarsen(c, coarser):
    """Forget refinements: collapse along the identity onto an order
    with more relations."""
    if ps.dominates(coarser, c.poset) is None:
        raise InputError("the target order must dominate the current one")
    return quotient_configuration(c, {i: i for i in c.poset.labels}, coarser)


# --------------------------------------------------------------------------
# split tests, best systems, improvements
# --------------------------------------------------------------------------

def _section_exists(m):
    """Is there a right inverse of the surjection m as a morphism of
    representations?  Solved as one linear system over the field."""
    A, B = m.source, m.target
    F = A.F
    quiver = A.quiver
    idx = {}
    for v in range(quiver.n):
        for r in range(B.dims[v]):
            for col in range(A.dims[v]):
                idx[(v, r, col)] = len(idx)
    nunk = len(idx)
    cols = []
    rhs = []
    for v in range(quiver.n):
        P = m.mats[v]
        for r in range(B.dims[v]):
            for b in range(B.dims[v]):
                eq = {}
                for col in range(A.dims[v]):
                    cf = P[col][b]
                    if cf:
                        eq[idx[(v, r, col)]] = cf
                cols.append(eq)
                rhs.append(1 if r == b else 0)
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        Aa = A.map_for(a)
        Ba = B.map_for(a)
        for r in range(B.dims[s]):
            for ct in range(A.dims[t]):
                eq = {}
                for col in range(A.dims[s]):
                    cf = Aa[col][ct]
                    if cf:
                        eq[idx[(s, r, col)]] = F.add(
                            eq.get(idx[(s, r, col)], 0), cf)
                for rt in range(B.dims[t]):
                    cf = Ba[r][rt]
                    if cf:
                        key = idx[(t, rt, ct)]
                        eq[key] = F.sub(eq.get(key, 0), cf)
                cols.append(eq)
                rhs.append(0)
    if nunk == 0:
        return all(x == 0 for x in rhs)
    rows = tuple(tuple(eq.get(u, 0) for eq in cols) for u in range(nunk))
    return express_in_rows(F, rows, tuple(rhs)) is not None


def split_pairs(c):
    """Covering pairs (i, j) of the order whose two-element subquotient
    extension splits."""
    out = []
    for (i, j) in c.poset.covers:
        K = frozenset({i, j})
        proj = c.pi[(K, frozenset({j}))]
        if _section_exists(proj):
            out.append((i, j))
    return out


def is_best(c):
    """No covering pair's two-element extension splits.  Orders with no
    covering pairs qualify vacuously."""
    return not split_pairs(c)


def improvements(c, refined):
    """All systems on the refined order that collapse back to c along
    the identity.

    ``refined`` must be an order on the same labels dominated by the
    order of c (fewer or equal relations).  Enumeration runs over the
    subobjects that could fill the principal lower sets that are new in
    the refined order, then keeps the assignments whose completed
    lattice restricts to the lattice of c.
    """
    p = c.poset
    if frozenset(refined.labels) != frozenset(p.labels):
        raise InputError("refined order must live on the same labels")
    if ps.dominates(p, refined) is None:
        raise InputError("the configuration's order must dominate the "
                         "refined order")
    X = ambient_rep(c)
    fams = ambient_families(c)
    F = X.F
    old_lower = set(p.lower_sets)
    kap = kappa_of(c)

    forced = {}
    unknown = []
    for i in sorted(refined.labels,
                    key=lambda a: (len(refined.down_set(a)), str(a))):
        S = refined.down_set(i)
        if S in old_lower:
            forced[i] = fams[S]
        else:
            need = tuple(sum(kap[j][v] for j in S)
                         for v in range(X.quiver.n))
            unknown.append((i, S, need))

    by_dims = {}
    for fam in subobjects(X):
        by_dims.setdefault(family_dims(fam), []).append(fam)

    solutions = []

    def rec(k, chosen):
        if k == len(unknown):
            principal = dict(forced)
            principal.update(chosen)
            full = _complete_families(X, refined, principal)
            if full is None:
                return
            for A in refined.lower_sets:
                if A in old_lower and not family_eq(full[A], fams[A]):
                    return
            solutions.append(full)
            return
        i, S, need = unknown[k]
        base = zero_family(X)
        for j in S:
            if j == i:
                continue
            prev = chosen.get(j, forced.get(j))
            if prev is None:
                continue
            base = family_sum(F, base, prev, X.dims)
        cap = fams[p.down_set(i)]
        for fam in by_dims.get(need, ()):
            if family_leq(F, base, fam) and family_leq(F, fam, cap):
                chosen[i] = fam
                rec(k + 1, chosen)
                del chosen[i]

    rec(0, {})
    return [build_configuration(X, refined, sol) for sol in solutions]


# --------------------------------------------------------------------------
# symmetry groups and moduli points
# --------------------------------------------------------------------------

def unit_group(X, budget=DEFAULT_AUT_BUDGET):
    """All automorphisms of X as per-vertex matrix tuples, by scanning
    the endomorphism space.  The count is cross-checked against the
    closed-form automorphism order."""
    F = X.F
    basis = hom_space(X, X)
    e = len(basis)
    if F.q ** e > budget:
        raise SizeBoundError(
            "scanning %d^%d endomorphisms exceeds the budget %d"
            % (F.q, e, budget))
    n = X.quiver.n
    units = []
    for cf in itertools.product(F.elements, repeat=e):
        mats = []
        ok = True
        for v in range(n):
            d = X.dims[v]
            rows = [[0] * d for _ in range(d)]
            for k, ck in enumerate(cf):
                if not ck:
                    continue
                bm = basis[k].mats[v]
                for r in range(d):
                    for col in range(d):
                        if bm[r][col]:
                            rows[r][col] = F.add(
                                rows[r][col], F.mul(ck, bm[r][col]))
            mat = tuple(tuple(row) for row in rows)
            if d and qv._rank(F, mat) != d:
                ok = False
                break
            mats.append(mat)
        if ok:
            units.append(tuple(mats))
    assert len(units) == aut_order(X), \
        "unit scan disagrees with the closed-form automorphism order"
    return units


def _family_image(F, fam, g, dims):
    out = []
    for v in range(len(dims)):
        rows = fam[v]
        if not rows:
            out.append(())
            continue
        moved = mat_mul(F, rows, g[v]) if dims[v] else ()
        out.append(span(F, moved, n=dims[v]))
    return tuple(out)


def _point_key_of(poset, fams, order):
    return tuple(fams[A] for A in order)


class ConfigModuliPoint:
    """One isomorphism class in a moduli enumeration: canonical key,
    the order of its own symmetry group, flag bits, and the witness
    system itself."""

    __slots__ = ("key", "aut_order", "flags", "config", "family_key")

    def __init__(self, key, aut, flags, config, family_key):
        self.key = key
        self.aut_order = aut
        self.flags = flags
        self.config = config
        self.family_key = family_key

    def __repr__(self):
        return "ConfigModuliPoint(aut=%d, flags=%r)" % (
            self.aut_order, self.flags)


def principal_factors(X, poset, fams):
    """The subquotient at each singleton, straight from the lattice."""
    return {i: _FactorData(X, poset, fams, frozenset({i})).rep
            for i in poset.labels}


def _flags_for(X, poset, fams, sc, config):
    if sc is None:
        ss = si = stf = None
    else:
        factors = principal_factors(X, poset, fams)
        kinds = {i: st.classify(factors[i], sc) for i in poset.labels}
        ss = all(k != "unstable" for k in kinds.values())
        si = ss and all(qv.is_indecomposable(factors[i])
                        for i in poset.labels)
        stf = all(k == "stable" for k in kinds.values())
    return {"ss": ss, "si": si, "st": stf, "best": is_best(config)}


def _poset_signature(poset):
    return (tuple(poset.labels), tuple(sorted(poset.strict_pairs)))


def _points_for_rep(X, poset, kappa, sc, fixed, aut_budget):
    fam_list = config_families(X, poset, kappa)
    if not fam_list:
        return []
    units = unit_group(X, aut_budget)
    order = poset.sort_subsets(poset.lower_sets)
    F = X.F
    xkey = class_key(X)
    psig = _poset_signature(poset)
    points = []
    if fixed:
        for fams in fam_list:
            pk = _point_key_of(poset, fams, order)
            stab = 0
            for g in units:
                if all(family_eq(_family_image(F, fams[A], g, X.dims),
                                 fams[A]) for A in order):
                    stab += 1
            cfg = build_configuration(X, poset, fams)
            flags = _flags_for(X, poset, fams, sc, cfg)
            points.append(ConfigModuliPoint(
                ("cfg-at", xkey, psig, pk), stab, flags, cfg, pk))
    else:
        seen = {}
        for fams in fam_list:
            pk = _point_key_of(poset, fams, order)
            seen[pk] = fams
        grouped = set()
        for pk in sorted(seen):
            if pk in grouped:
                continue
            fams = seen[pk]
            orbit = set()
            for g in units:
                img = tuple(_family_image(F, fams[A], g, X.dims)
                            for A in order)
                orbit.add(img)
            assert orbit <= set(seen), "orbit left the family set"
            grouped |= orbit
            assert len(units) % len(orbit) == 0
            aut = len(units) // len(orbit)
            rep_key = min(orbit)
            rep_fams = seen[rep_key]
            cfg = build_configuration(X, poset, rep_fams)
            flags = _flags_for(X, poset, rep_fams, sc, cfg)
            points.append(ConfigModuliPoint(
                ("cfg", xkey, psig, rep_key), aut, flags, cfg, rep_key))
    points.sort(key=lambda pt: repr(pt.key))
    return points


def enumerate_config_moduli(X, poset, kappa, sc=None, *, quiver=None, q=None,
                            max_poset=4, max_dim=4,
                            aut_budget=DEFAULT_AUT_BUDGET):
    """Isomorphism classes of systems with the given index data.

    With X fixed, points are lattices of subobjects of X (two systems
    count as the same point only when related by a symmetry restricting
    to the identity on X), and each point still reports the order of
    its full symmetry group.  With X=None, classes of the summed
    dimension vector are enumerated and points are grouped under the
    symmetry groups of the ambients.
    """
    if poset.n > max_poset:
        raise SizeBoundError("index sets larger than %d are out of scope"
                             % max_poset)
    try:
        kap = {i: tuple(int(x) for x in kappa[i]) for i in poset.labels}
    except KeyError as missing:
        raise InputError("kappa misses label %r" % missing.args[0])
    for i, vec in kap.items():
        if not any(vec):
            raise InputError("the class at %r must be nonzero" % (i,))
        if any(x < 0 for x in vec):
            raise InputError("classes must be nonnegative vectors")
    if X is not None:
        if X.total_dim > max_dim:
            raise SizeBoundError("total dimension above %d is out of scope"
                                 % max_dim)
        return _points_for_rep(X, poset, kap, sc, True, aut_budget)
    if quiver is None or q is None:
        raise InputError("free enumeration needs the quiver and the field "
                         "size")
    total = tuple(sum(kap[i][v] for i in poset.labels)
                  for v in range(quiver.n))
    if sum(total) > max_dim:
        raise SizeBoundError("total dimension above %d is out of scope"
                             % max_dim)
    points = []
    for entry in qv.enumerate_reps(quiver, total, q):
        points.extend(
            _points_for_rep(entry.rep, poset, kap, sc, False, aut_budget))
    points.sort(key=lambda pt: repr(pt.key))
    return points


# --------------------------------------------------------------------------
# the dense-quiver witness
# --------------------------------------------------------------------------

def order_witness_rep(poset, q):
    """A representation of the dense quiver on the poset's labels whose
    subobjects are exactly the coordinate subspaces indexed by lower
    sets: each arrow carries 1 precisely when its target lies strictly
    below its source.  Nonzero paths strictly descend, so the
    representation is nilpotent for every order."""
    verts = poset.labels
    arrows = tuple((a, b) for a in verts for b in verts if a != b)
    quiver = Quiver(verts, arrows, name="dense%d" % len(verts))
    maps = tuple((((1,),) if poset.lt(b, a) else ((0,),))
                 for (a, b) in arrows)
    return QuiverRep(quiver, q, (1,) * poset.n, maps)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def _mats_payload(mats):
    return [[list(row) for row in mat] for mat in mats]


def _mats_restore(data):
    return tuple(tuple(tuple(int(x) for x in row) for row in mat)
                 for mat in data)


def config_to_payload(c):
    """JSON-ready dict with deterministic ordering; exact integers."""
    p = c.poset
    quiver = c.quiver
    fs = p.sort_subsets(p.f_sets)
    sigma = [{"part": sorted(J),
              "dims": list(c.sigma[J].dims),
              "maps": _mats_payload(c.sigma[J].maps)} for J in fs]
    iota = [{"src": sorted(J), "dst": sorted(K),
             "mats": _mats_payload(c.iota[(J, K)].mats)}
            for (J, K) in sorted(c.iota, key=lambda jk:
                                 (sorted(jk[0]), sorted(jk[1])))]
    pi = [{"src": sorted(J), "dst": sorted(K),
           "mats": _mats_payload(c.pi[(J, K)].mats)}
          for (J, K) in sorted(c.pi, key=lambda jk:
                               (sorted(jk[0]), sorted(jk[1])))]
    return {
        "quiver": {"vertices": list(quiver.vertices),
                   "arrows": [list(ab) for ab in quiver.arrows],
                   "name": quiver.name},
        "q": c.q,
        "labels": list(p.labels),
        "relations": sorted([a, b] for (a, b) in p.strict_pairs),
        "sigma": sigma,
        "iota": iota,
        "pi": pi,
    }


def config_from_payload(payload):
    qd = payload["quiver"]
    quiver = Quiver(tuple(qd["vertices"]),
                    tuple(tuple(ab) for ab in qd["arrows"]),
                    name=qd.get("name", ""))
    q = int(payload["q"])
    poset = ps.FinitePoset(tuple(payload["labels"]),
                           pairs=tuple(tuple(rel)
                                       for rel in payload["relations"]))
    sigma = {}
    for item in payload["sigma"]:
        J = frozenset(item["part"])
        sigma[J] = QuiverRep(quiver, q, tuple(item["dims"]),
                             _mats_restore(item["maps"]))
    iota = {}
    for item in payload["iota"]:
        J, K = frozenset(item["src"]), frozenset(item["dst"])
        iota[(J, K)] = RepMorphism(sigma[J], sigma[K],
                                   _mats_restore(item["mats"]))
    pi = {}
    for item in payload["pi"]:
        J, K = frozenset(item["src"]), frozenset(item["dst"])
        pi[(J, K)] = RepMorphism(sigma[J], sigma[K],
                                 _mats_restore(item["mats"]))
    return Configuration(poset, sigma, iota, pi)
