"""Quivers and their nilpotent representations over small finite fields.

A quiver is a finite directed multigraph.  A representation assigns a
finite-dimensional F_q vector space to every vertex and a linear map to
every arrow.  Everything here uses the row-vector convention of
:mod:`repconf.gf`: a map V -> W with dim V = m and dim W = n is an m-by-n
matrix M acting v |-> v * M, and "f then g" has matrix Mf * Mg.

When the quiver has a directed cycle we insist the representation is
nilpotent: the radical chain (images of longer and longer composites)
must reach zero.  For acyclic quivers this holds automatically.

Isomorphism classes are fingerprinted by field-size-independent data
(dimensions, ranks of path composites, radical/socle layers, ...).  The
fingerprint is complete on the families this package enumerates; the
enumerator verifies that on every run and refuses to emit keys when two
distinct orbits collide, rather than silently merging them.
"""

import itertools
from collections import deque

from .errors import InputError, SizeBoundError, UnsupportedError
from .gf import (
    field,
    zero_matrix,
    identity_matrix,
    mat_mul,
    mat_vec,
    rref,
    rank,
    left_kernel,
    express_in_rows,
    span,
    in_span,
    complete_basis,
    coords,
    enumerate_matrices,
    all_subspaces,
    gl_order,
    mat_inverse,
)

__all__ = [
    "Quiver", "parse_quiver", "format_quiver",
    "line_quiver", "loop_quiver", "complete_quiver",
    "QuiverRep", "zero_rep", "simple_rep", "semisimple_rep",
    "interval_rep", "jordan_rep",
    "RepMorphism", "hom_space", "hom_dim",
    "subobjects", "family_dims", "full_family", "zero_family",
    "family_leq", "family_sum", "family_intersect", "family_eq",
    "sub_rep", "quotient_rep", "direct_sum",
    "radical_chain", "socle_chain",
    "rep_profile", "class_key", "ClassEntry", "enumerate_reps",
    "decompose_indecomposable", "is_indecomposable", "aut_order",
    "find_isomorphism", "partitions", "centralizer_order",
    "rep_to_payload", "rep_from_payload",
]


# --------------------------------------------------------------------------
# dimension-aware matrix helpers (a composite through a zero space must be
# an actual zero matrix, which the bare gf routines cannot infer)
# --------------------------------------------------------------------------

def _mul(F, A, B, sdim, mdim, tdim):
    if sdim == 0:
        return ()
    if mdim == 0 or tdim == 0:
        return zero_matrix(sdim, tdim)
    return mat_mul(F, A, B)


def _apply(F, v, M, tdim):
    if tdim == 0:
        return ()
    if not v:
        return (0,) * tdim
    return mat_vec(F, v, M)


def _rank(F, M):
    if not M or not M[0]:
        return 0
    return rank(F, M)


# --------------------------------------------------------------------------
# quivers
# --------------------------------------------------------------------------

class Quiver:
    """Finite directed multigraph with labelled vertices."""

    __slots__ = ("vertices", "arrows", "name", "_index")

    def __init__(self, vertices, arrows, name=""):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise InputError("duplicate vertex labels: %r" % (vertices,))
        index = {v: i for i, v in enumerate(vertices)}
        arrs = []
        for a in arrows:
            s, t = a
            if s not in index or t not in index:
                raise InputError("arrow %r -> %r uses an unknown vertex"
                                 % (s, t))
            arrs.append((s, t))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "arrows", tuple(arrs))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, *a):
        raise AttributeError("Quiver is immutable")

    def __eq__(self, other):
        return (isinstance(other, Quiver)
                and self.vertices == other.vertices
                and self.arrows == other.arrows)

    def __hash__(self):
        return hash((self.vertices, self.arrows))

    def __repr__(self):
        return "Quiver(%r, %r)" % (list(self.vertices), list(self.arrows))

    @property
    def n(self):
        return len(self.vertices)

    def vertex_index(self, v):
        try:
            return self._index[v]
        except KeyError:
            raise InputError("unknown vertex %r" % (v,))

    def arrow_endpoints(self, a):
        """Arrow index -> (source index, target index)."""
        s, t = self.arrows[a]
        return self._index[s], self._index[t]

    def arrows_out(self, vi):
        return tuple(a for a in range(len(self.arrows))
                     if self._index[self.arrows[a][0]] == vi)

    def arrows_in(self, vi):
        return tuple(a for a in range(len(self.arrows))
                     if self._index[self.arrows[a][1]] == vi)

    def has_directed_cycle(self):
        n = self.n
        adj = [set() for _ in range(n)]
        for a in range(len(self.arrows)):
            s, t = self.arrow_endpoints(a)
            if s == t:
                return True
            adj[s].add(t)
        state = [0] * n  # 0 unseen, 1 in progress, 2 done

        def visit(u):
            state[u] = 1
            for w in adj[u]:
                if state[w] == 1:
                    return True
                if state[w] == 0 and visit(w):
                    return True
            state[u] = 2
            return False

        return any(state[u] == 0 and visit(u) for u in range(n))

    # shape tests used to pick fast classification routes
    def is_edgeless(self):
        return not self.arrows

    def is_loop_shape(self):
        return self.n == 1 and len(self.arrows) == 1

    def is_line_shape(self):
        """Vertices form a single path 0 -> 1 -> ... -> n-1 (in index
        order) with exactly one arrow between consecutive vertices."""
        if len(self.arrows) != self.n - 1:
            return False
        eps = sorted(self.arrow_endpoints(a) for a in range(len(self.arrows)))
        return eps == [(i, i + 1) for i in range(self.n - 1)]


def parse_quiver(text, name=""):
    """Parse the plain-text quiver format::

        vertex 1
        vertex 2
        arrow 1 2

    Lines may carry ``#`` comments; order of declarations is significant.
    """
    vertices = []
    arrows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex":
            if len(parts) != 2:
                raise InputError("line %d: expected 'vertex <label>'"
                                 % lineno)
            if parts[1] in vertices:
                raise InputError("line %d: duplicate vertex %r"
                                 % (lineno, parts[1]))
            vertices.append(parts[1])
        elif parts[0] == "arrow":
            if len(parts) != 3:
                raise InputError("line %d: expected 'arrow <src> <dst>'"
                                 % lineno)
            if parts[1] not in vertices or parts[2] not in vertices:
                raise InputError("line %d: arrow endpoint not declared yet"
                                 % lineno)
            arrows.append((parts[1], parts[2]))
        else:
            raise InputError("line %d: unknown directive %r"
                             % (lineno, parts[0]))
    if not vertices:
        raise InputError("quiver file declares no vertices")
    return Quiver(vertices, arrows, name=name)


def format_quiver(quiver):
    lines = ["vertex %s" % v for v in quiver.vertices]
    lines += ["arrow %s %s" % (s, t) for s, t in quiver.arrows]
    return "\n".join(lines) + "\n"


def line_quiver(n):
    """The linearly ordered quiver 1 -> 2 -> ... -> n."""
    verts = tuple(str(i) for i in range(1, n + 1))
    return Quiver(verts, tuple((verts[i], verts[i + 1])
                               for i in range(n - 1)),
                  name="line%d" % n)


def loop_quiver():
    """One vertex with a single loop."""
    return Quiver(("1",), (("1", "1"),), name="loop")


def complete_quiver(n):
    """n vertices with one arrow in each direction between every pair."""
    verts = tuple(str(i) for i in range(1, n + 1))
    arrows = tuple((a, b) for a in verts for b in verts if a != b)
    return Quiver(verts, arrows, name="complete%d" % n)


# --------------------------------------------------------------------------
# representations
# --------------------------------------------------------------------------

class QuiverRep:
    """A representation: dims per vertex, one matrix per arrow.

    ``dims`` is a tuple aligned with ``quiver.vertices``; ``maps`` is a
    tuple aligned with ``quiver.arrows``, where the matrix for an arrow
    s -> t has dims[s] rows of length dims[t].
    """

    __slots__ = ("quiver", "q", "dims", "maps", "_profile")

    def __init__(self, quiver, q, dims, maps, check=True):
        dims = tuple(int(d) for d in dims)
        maps = tuple(tuple(tuple(row) for row in M) for M in maps)
        object.__setattr__(self, "quiver", quiver)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "_profile", None)
        if not check:
            return
        if len(dims) != quiver.n or any(d < 0 for d in dims):
            raise InputError("dimension vector %r does not fit the quiver"
                             % (dims,))
        if len(maps) != len(quiver.arrows):
            raise InputError("expected %d arrow matrices, got %d"
                             % (len(quiver.arrows), len(maps)))
        for a, M in enumerate(maps):
            s, t = quiver.arrow_endpoints(a)
            if len(M) != dims[s] or any(len(row) != dims[t] for row in M):
                raise InputError(
                    "matrix for arrow %d must be %d-by-%d" %
                    (a, dims[s], dims[t]))
            if any(not (0 <= x < q) for row in M for x in row):
                raise InputError("matrix entries must be field elements")
        if quiver.has_directed_cycle() and not _radical_terminates(self):
            raise InputError(
                "representation is not nilpotent: the radical chain "
                "does not reach zero")

    def __setattr__(self, *a):
        raise AttributeError("QuiverRep is immutable")

    @property
    def F(self):
        return field(self.q)

    @property
    def total_dim(self):
        return sum(self.dims)

    @property
    def dim_vector(self):
        """The class of the representation in the dimension lattice."""
        return self.dims

    def map_for(self, a):
        return self.maps[a]

    def __eq__(self, other):
        return (isinstance(other, QuiverRep)
                and self.quiver == other.quiver and self.q == other.q
                and self.dims == other.dims and self.maps == other.maps)

    def __hash__(self):
        return hash((self.quiver, self.q, self.dims, self.maps))

    def __repr__(self):
        return "QuiverRep(q=%d, dims=%r)" % (self.q, self.dims)


def zero_rep(quiver, q):
    dims = (0,) * quiver.n
    maps = tuple(() for _ in quiver.arrows)
    return QuiverRep(quiver, q, dims, maps, check=False)


def simple_rep(quiver, q, vertex):
    """One-dimensional space at the given vertex label, zero elsewhere."""
    vi = quiver.vertex_index(vertex)
    dims = tuple(1 if i == vi else 0 for i in range(quiver.n))
    maps = []
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        maps.append(zero_matrix(dims[s], dims[t]))
    return QuiverRep(quiver, q, dims, maps)


def semisimple_rep(quiver, q, mults):
    """All arrow maps zero; dims given by the multiplicity vector."""
    mults = tuple(mults)
    maps = []
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        maps.append(zero_matrix(mults[s], mults[t]))
    return QuiverRep(quiver, q, mults, maps)


def interval_rep(quiver, q, lo, hi):
    """For a line-shaped quiver: one-dimensional spaces on the vertex
    index range [lo, hi] joined by identity maps."""
    if not quiver.is_line_shape():
        raise InputError("interval representations need a line quiver")
    dims = tuple(1 if lo <= i <= hi else 0 for i in range(quiver.n))
    maps = []
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        if lo <= s and t <= hi:
            maps.append(((1,),))
        else:
            maps.append(zero_matrix(dims[s], dims[t]))
    return QuiverRep(quiver, q, dims, maps)


def jordan_rep(quiver, q, partition):
    """For the one-loop quiver: block nilpotent map with the given block
    sizes (ones on each block's superdiagonal)."""
    if not quiver.is_loop_shape():
        raise InputError("block nilpotent maps need the one-loop quiver")
    partition = tuple(sorted((int(p) for p in partition), reverse=True))
    if any(p <= 0 for p in partition):
        raise InputError("block sizes must be positive")
    d = sum(partition)
    M = [[0] * d for _ in range(d)]
    off = 0
    for p in partition:
        for i in range(p - 1):
            M[off + i][off + i + 1] = 1
        off += p
    return QuiverRep(quiver, q, (d,), (tuple(tuple(r) for r in M),))


# --------------------------------------------------------------------------
# radical / socle chains and nilpotency
# --------------------------------------------------------------------------

def radical_chain(X):
    """[W0, W1, ...]: W0 is everything and W_{k+1} is spanned by the
    images of W_k under the arrow maps.  Stops when stable."""
    F = X.F
    quiver = X.quiver
    chain = [tuple(identity_matrix(d) for d in X.dims)]
    while True:
        prev = chain[-1]
        nxt = []
        for ti in range(quiver.n):
            rows = []
            for a in quiver.arrows_in(ti):
                s, t = quiver.arrow_endpoints(a)
                for u in prev[s]:
                    rows.append(_apply(F, u, X.maps[a], X.dims[ti]))
            nxt.append(rref(F, rows, ncols=X.dims[ti])[0] if rows else ())
        nxt = tuple(nxt)
        if nxt == prev:
            break
        chain.append(nxt)
        if all(not sp for sp in nxt):
            break
    return chain


def socle_chain(X):
    """[S0, S1, ...]: S0 = 0 and S_{k+1}/S_k collects the vectors every
    outgoing arrow sends into S_k."""
    F = X.F
    quiver = X.quiver
    chain = [tuple(() for _ in range(quiver.n))]
    while True:
        prev = chain[-1]
        nxt = []
        for si in range(quiver.n):
            d = X.dims[si]
            if d == 0:
                nxt.append(())
                continue
            # stack the maps F^d -> prod of quotient-by-prev targets
            cols = []
            width = 0
            for a in quiver.arrows_out(si):
                s, t = quiver.arrow_endpoints(a)
                td = X.dims[t]
                if td == 0:
                    continue
                ann = _quotient_test_matrix(F, prev[t], td)
                block = _mul(F, X.maps[a], ann, d, td,
                             len(ann[0]) if ann and ann[0] else 0)
                if block and block[0]:
                    cols.append(block)
                    width += len(block[0])
            if width == 0:
                nxt.append(tuple(identity_matrix(d)))
                continue
            stacked = tuple(
                tuple(x for block in cols for x in block[i])
                for i in range(d))
            nxt.append(left_kernel(F, stacked, nrows=d))
        nxt = tuple(nxt)
        if nxt == prev:
            break
        chain.append(nxt)
        if all(len(sp) == X.dims[i] for i, sp in enumerate(nxt)):
            break
    return chain


def _quotient_test_matrix(F, U, n):
    """A matrix whose kernel (acting on row vectors) is exactly the span
    of U inside F^n: vanishing of v*M tests membership."""
    from .gf import annihilator
    ann = annihilator(F, U, n)
    if not ann:
        return zero_matrix(n, 0)
    # columns = the annihilator functionals
    return tuple(tuple(a[i] for a in ann) for i in range(n))


def _radical_terminates(X):
    chain = radical_chain(X)
    return all(not sp for sp in chain[-1])


# --------------------------------------------------------------------------
# morphisms and hom spaces
# --------------------------------------------------------------------------

class RepMorphism:
    """Per-vertex matrices commuting with the arrow maps."""

    __slots__ = ("source", "target", "mats")

    def __init__(self, source, target, mats, check=True):
        mats = tuple(tuple(tuple(row) for row in M) for M in mats)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "mats", mats)
        if not check:
            return
        if source.quiver != target.quiver or source.q != target.q:
            raise InputError("morphism endpoints live over different data")
        for v in range(source.quiver.n):
            M = mats[v]
            if len(M) != source.dims[v] or any(
                    len(row) != target.dims[v] for row in M):
                raise InputError("matrix at vertex %d must be %d-by-%d"
                                 % (v, source.dims[v], target.dims[v]))
        F = source.F
        for a in range(len(source.quiver.arrows)):
            s, t = source.quiver.arrow_endpoints(a)
            lhs = _mul(F, source.maps[a], mats[t],
                       source.dims[s], source.dims[t], target.dims[t])
            rhs = _mul(F, mats[s], target.maps[a],
                       source.dims[s], target.dims[s], target.dims[t])
            if lhs != rhs:
                raise InputError("matrices do not commute with arrow %d" % a)

    def __setattr__(self, *a):
        raise AttributeError("RepMorphism is immutable")

    def is_injective(self):
        F = self.source.F
        return all(_rank(F, self.mats[v]) == self.source.dims[v]
                   for v in range(self.source.quiver.n))

    def is_surjective(self):
        F = self.source.F
        return all(_rank(F, self.mats[v]) == self.target.dims[v]
                   for v in range(self.source.quiver.n))

    def is_iso(self):
        return (self.source.dims == self.target.dims
                and self.is_injective())

    def then(self, other):
        """self followed by other."""
        if other.source is not self.target and \
                (other.source.dims != self.target.dims
                 or other.source.maps != self.target.maps):
            raise InputError("morphisms do not compose")
        F = self.source.F
        mats = tuple(
            _mul(F, self.mats[v], other.mats[v],
                 self.source.dims[v], self.target.dims[v],
                 other.target.dims[v])
            for v in range(self.source.quiver.n))
        return RepMorphism(self.source, other.target, mats, check=False)

    def apply_family(self, fam):
        """Push a per-vertex row-space family through the morphism."""
        F = self.source.F
        out = []
        for v in range(self.source.quiver.n):
            rows = [_apply(F, u, self.mats[v], self.target.dims[v])
                    for u in fam[v]]
            out.append(rref(F, rows, ncols=self.target.dims[v])[0]
                       if rows else ())
        return tuple(out)

    def kernel_family(self):
        F = self.source.F
        return tuple(left_kernel(F, self.mats[v], nrows=self.source.dims[v])
                     for v in range(self.source.quiver.n))

    def __repr__(self):
        return "RepMorphism(%r -> %r)" % (self.source.dims,
                                          self.target.dims)


def identity_morphism(X):
    return RepMorphism(X, X, tuple(identity_matrix(d) for d in X.dims),
                       check=False)


def hom_space(X, Y):
    """A canonical basis of the space of morphisms X -> Y."""
    if X.quiver != Y.quiver or X.q != Y.q:
        raise InputError("hom space needs a common quiver and field")
    F = X.F
    quiver = X.quiver
    # unknowns: entries of the per-vertex matrices, vertex-major
    offs = []
    total = 0
    for v in range(quiver.n):
        offs.append(total)
        total += X.dims[v] * Y.dims[v]
    if total == 0:
        return []
    # equations: for each arrow a: s->t, (R_a * P_t - P_s * R'_a) = 0,
    # one equation per (i, j) entry of the dims[s]-by-Y.dims[t] result
    neqs = sum(X.dims[s] * Y.dims[t]
               for a in range(len(quiver.arrows))
               for s, t in [quiver.arrow_endpoints(a)])
    colmat = [[0] * neqs for _ in range(total)]
    eq = 0
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        R, Rp = X.maps[a], Y.maps[a]
        for i in range(X.dims[s]):
            for j in range(Y.dims[t]):
                # coefficient of P_t[k][j]: R[i][k]
                for k in range(X.dims[t]):
                    if R[i][k]:
                        colmat[offs[t] + k * Y.dims[t] + j][eq] = \
                            F.add(colmat[offs[t] + k * Y.dims[t] + j][eq],
                                  R[i][k])
                # coefficient of P_s[i][l]: -R'[l][j]
                for l in range(Y.dims[s]):
                    if Rp[l][j]:
                        col = offs[s] + i * Y.dims[s] + l
                        colmat[col][eq] = F.sub(colmat[col][eq], Rp[l][j])
                eq += 1
    if neqs == 0:
        basis = identity_matrix(total)
    else:
        basis = left_kernel(F, tuple(tuple(r) for r in colmat), nrows=total)
    out = []
    for vec in basis:
        mats = []
        for v in range(quiver.n):
            block = vec[offs[v]:offs[v] + X.dims[v] * Y.dims[v]]
            mats.append(tuple(
                tuple(block[i * Y.dims[v]:(i + 1) * Y.dims[v]])
                for i in range(X.dims[v])))
        out.append(RepMorphism(X, Y, mats, check=False))
    return out


def hom_dim(X, Y):
    return len(hom_space(X, Y))


# --------------------------------------------------------------------------
# subobjects, quotients, sums
# --------------------------------------------------------------------------

def full_family(X):
    return tuple(identity_matrix(d) for d in X.dims)


def zero_family(X):
    return tuple(() for _ in range(X.quiver.n))


def family_dims(fam):
    return tuple(len(sp) for sp in fam)


def family_eq(A, B):
    return tuple(A) == tuple(B)


def family_leq(F, A, B):
    return all(all(in_span(F, B[v], u) for u in A[v])
               for v in range(len(A)))


def family_sum(F, A, B, dims):
    return tuple(rref(F, list(A[v]) + list(B[v]), ncols=dims[v])[0]
                 for v in range(len(A)))


def family_intersect(F, A, B, dims):
    from .gf import sub_intersect
    return tuple(sub_intersect(F, A[v], B[v], dims[v])
                 for v in range(len(A)))


def _family_invariant(F, X, fam):
    for a in range(len(X.quiver.arrows)):
        s, t = X.quiver.arrow_endpoints(a)
        for u in fam[s]:
            img = _apply(F, u, X.maps[a], X.dims[t])
            if X.dims[t] == 0:
                if any(img):
                    return False
            elif not in_span(F, fam[t], img):
                return False
    return True


def subobjects(X, budget=2_000_000):
    """All subrepresentations of X as per-vertex canonical row-space
    families, sorted deterministically."""
    if X in _SUB_MEMO:
        return _SUB_MEMO[X]
    F = X.F
    per_vertex = [list(all_subspaces(F, d)) for d in X.dims]
    count = 1
    for opts in per_vertex:
        count *= len(opts)
    if count > budget:
        raise SizeBoundError(
            "subobject scan would visit %d candidate families" % count)
    out = []
    for fam in itertools.product(*per_vertex):
        if _family_invariant(F, X, fam):
            out.append(tuple(fam))
    out.sort(key=lambda fam: (family_dims(fam), fam))
    _SUB_MEMO[X] = out
    return out


_SUB_MEMO = {}


def sub_rep(X, fam):
    """The subrepresentation on a per-vertex invariant family, plus its
    inclusion morphism."""
    F = X.F
    quiver = X.quiver
    sdims = family_dims(fam)
    maps = []
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        rows = []
        for u in fam[s]:
            img = _apply(F, u, X.maps[a], X.dims[t])
            rows.append(coords(F, fam[t], img) if sdims[t] else ())
        maps.append(tuple(rows))
    S = QuiverRep(quiver, X.q, sdims, maps, check=False)
    incl = RepMorphism(S, X, tuple(fam), check=False)
    return S, incl


def quotient_rep(X, fam):
    """The quotient by a per-vertex invariant family, plus the projection
    morphism X -> X/U."""
    F = X.F
    quiver = X.quiver
    lifts = []
    for v in range(quiver.n):
        d = X.dims[v]
        lifts.append(complete_basis(F, fam[v], identity_matrix(d))
                     if d else ())
    qdims = tuple(len(L) for L in lifts)
    proj = []
    for v in range(quiver.n):
        d = X.dims[v]
        rows = []
        basis = tuple(fam[v]) + tuple(lifts[v])
        for i in range(d):
            e = tuple(1 if j == i else 0 for j in range(d))
            x = coords(F, basis, e)
            rows.append(tuple(x[len(fam[v]):]))
        proj.append(tuple(rows))
    maps = []
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        rows = []
        for w in lifts[s]:
            img = _apply(F, w, X.maps[a], X.dims[t])
            rows.append(tuple(_apply(F, img, proj[t], qdims[t])))
        maps.append(tuple(rows))
    Q = QuiverRep(quiver, X.q, qdims, maps, check=False)
    pr = RepMorphism(X, Q, tuple(proj), check=False)
    return Q, pr


def direct_sum(X, Y):
    if X.quiver != Y.quiver or X.q != Y.q:
        raise InputError("direct sum needs a common quiver and field")
    quiver = X.quiver
    dims = tuple(X.dims[v] + Y.dims[v] for v in range(quiver.n))
    maps = []
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        M = []
        for row in X.maps[a]:
            M.append(tuple(row) + (0,) * Y.dims[t])
        for row in Y.maps[a]:
            M.append((0,) * X.dims[t] + tuple(row))
        maps.append(tuple(M))
    return QuiverRep(quiver, X.q, dims, maps, check=False)


# --------------------------------------------------------------------------
# isomorphism-class fingerprints
# --------------------------------------------------------------------------

def _all_paths(quiver, max_len, cap=4000):
    """Composable arrow-index sequences of length 1..max_len."""
    paths = []
    frontier = [(a,) for a in range(len(quiver.arrows))]
    for _ in range(max_len):
        if not frontier:
            break
        paths.extend(frontier)
        if len(paths) > cap:
            raise SizeBoundError("too many composable paths to fingerprint")
        nxt = []
        for p in frontier:
            _, t = quiver.arrow_endpoints(p[-1])
            for a in range(len(quiver.arrows)):
                s, _ = quiver.arrow_endpoints(a)
                if s == t:
                    nxt.append(p + (a,))
        frontier = nxt
    return paths


def _path_matrix(X, path):
    F = X.F
    s0, t = X.quiver.arrow_endpoints(path[0])
    M = X.maps[path[0]]
    sdim = X.dims[s0]
    mdim = X.dims[t]
    for a in path[1:]:
        _, t = X.quiver.arrow_endpoints(a)
        M = _mul(F, M, X.maps[a], sdim, mdim, X.dims[t])
        mdim = X.dims[t]
    return M, s0, t


def rep_profile(X):
    """Field-size-independent fingerprint of the isomorphism class (for
    the representation families this package enumerates)."""
    if X._profile is not None:
        return X._profile
    F = X.F
    quiver = X.quiver
    entries = [("dims", X.dims)]
    max_len = max(X.total_dim, 1)
    paths = _all_paths(quiver, max_len)
    by_ends = {}
    mats = {}
    for p in paths:
        M, s, t = _path_matrix(X, p)
        mats[p] = (M, s, t)
        entries.append(("path", p, _rank(F, M)))
        by_ends.setdefault((s, t), []).append(p)
    for (s, t), ps in sorted(by_ends.items()):
        for p1, p2 in itertools.combinations(sorted(ps), 2):
            A = mats[p1][0]
            B = mats[p2][0]
            if X.dims[s] and X.dims[t]:
                Ssum = tuple(tuple(F.add(a, b) for a, b in zip(r1, r2))
                             for r1, r2 in zip(A, B))
                entries.append(("pairsum", p1, p2, _rank(F, Ssum)))
            else:
                entries.append(("pairsum", p1, p2, 0))
    entries.append(("rad", tuple(family_dims(layer)
                                 for layer in radical_chain(X))))
    entries.append(("soc", tuple(family_dims(layer)
                                 for layer in socle_chain(X))))
    entries.append(("end", hom_dim(X, X)))
    profile = tuple(entries)
    object.__setattr__(X, "_profile", profile)
    return profile


def class_key(X):
    return ("cls", X.dims, rep_profile(X))


# --------------------------------------------------------------------------
# enumeration of isomorphism classes
# --------------------------------------------------------------------------

class ClassEntry(tuple):
    """(key, rep, aut_order) for one isomorphism class."""

    __slots__ = ()

    def __new__(cls, key, rep, aut_order):
        return tuple.__new__(cls, (key, rep, aut_order))

    @property
    def key(self):
        return self[0]

    @property
    def rep(self):
        return self[1]

    @property
    def aut_order(self):
        return self[2]


def _primitive_element(F):
    target = F.q - 1
    for x in F.elements:
        if x == 0:
            continue
        y, order = x, 1
        while y != 1:
            y = F.mul(y, x)
            order += 1
        if order == target:
            return x
    raise InputError("no primitive element found")  # pragma: no cover


def _gl_generators(F, n):
    if n == 0:
        return []
    gens = []
    gamma = _primitive_element(F)
    if gamma != 1:
        D = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        D[0][0] = gamma
        gens.append(tuple(tuple(r) for r in D))
    if n >= 2:
        P = [[0] * n for _ in range(n)]
        for i in range(n):
            P[i][(i + 1) % n] = 1
        gens.append(tuple(tuple(r) for r in P))
        E = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        E[0][1] = 1
        gens.append(tuple(tuple(r) for r in E))
    return gens


def enumerate_reps(quiver, dims, q, scan_budget=300_000):
    """All isomorphism classes with the given dimension vector, as
    ClassEntry records sorted by key.

    Routes: an orbit scan of every matrix tuple when the configuration
    space fits the budget, else a block-size route for the one-loop
    quiver.  Every scan cross-checks that fingerprints separate the
    orbits it found and refuses to hand out ambiguous keys otherwise.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != quiver.n or any(d < 0 for d in dims):
        raise InputError("dimension vector %r does not fit the quiver"
                         % (dims,))
    memo_key = (quiver, dims, q)
    if memo_key in _ENUM_MEMO:
        return _ENUM_MEMO[memo_key]
    exp = 0
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        exp += dims[s] * dims[t]
    if quiver.is_loop_shape():
        entries = _enumerate_loop_by_blocks(quiver, dims, q)
    elif q ** exp <= scan_budget:
        entries = _enumerate_by_scan(quiver, dims, q)
    else:
        raise SizeBoundError(
            "enumerating dims %r over F_%d needs %d states; no faster "
            "route applies to this quiver" % (dims, q, q ** exp))
    entries.sort(key=lambda e: repr(e.key))
    _ENUM_MEMO[memo_key] = entries
    return entries


_ENUM_MEMO = {}


def _enumerate_by_scan(quiver, dims, q):
    F = field(q)
    cyclic = quiver.has_directed_cycle()
    arrow_shapes = []
    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        arrow_shapes.append((dims[s], dims[t]))
    states = []
    for maps in itertools.product(*[
            list(enumerate_matrices(F, r, c)) for r, c in arrow_shapes]):
        rep = QuiverRep(quiver, q, dims, maps, check=False)
        if cyclic and not _radical_terminates(rep):
            continue
        states.append(maps)
    group_order = 1
    for d in dims:
        group_order *= gl_order(q, d)
    # per-vertex generator actions, with inverses precomputed
    actions = []
    for v in range(quiver.n):
        for g in _gl_generators(F, dims[v]):
            ginv = mat_inverse(F, g)
            actions.append((v, g, ginv))
    state_set = set(states)
    visited = set()
    entries = []
    seen_keys = {}
    for st in states:
        if st in visited:
            continue
        orbit = {st}
        queue = deque([st])
        while queue:
            cur = queue.popleft()
            for v, g, ginv in actions:
                img = []
                for a in range(len(quiver.arrows)):
                    s, t = quiver.arrow_endpoints(a)
                    M = cur[a]
                    if s == v:
                        M = _mul(F, ginv, M, dims[s], dims[s], dims[t])
                    if t == v:
                        M = _mul(F, M, g, dims[s], dims[t], dims[t])
                    img.append(M)
                img = tuple(img)
                if img not in orbit:
                    orbit.add(img)
                    queue.append(img)
        visited |= orbit
        assert orbit <= state_set, "group action left the state space"
        assert group_order % len(orbit) == 0
        rep = QuiverRep(quiver, q, dims, min(orbit), check=False)
        key = class_key(rep)
        if key in seen_keys:
            raise UnsupportedError(
                "two non-isomorphic representations with dims %r over "
                "F_%d share the same fingerprint; class keys would be "
                "ambiguous here" % (dims, q))
        seen_keys[key] = True
        entries.append(ClassEntry(key, rep, group_order // len(orbit)))
    return entries


def partitions(n):
    """Partitions of n as descending tuples, in descending lex order."""
    if n == 0:
        return [()]
    out = []

    def rec(rest, largest, prefix):
        if rest == 0:
            out.append(tuple(prefix))
            return
        for p in range(min(rest, largest), 0, -1):
            rec(rest - p, p, prefix + [p])

    rec(n, n, [])
    return out


def centralizer_order(q, partition):
    """Order of the automorphism group of the block-nilpotent map with
    the given block sizes."""
    partition = tuple(sorted(partition, reverse=True))
    mult = {}
    for p in partition:
        mult[p] = mult.get(p, 0) + 1
    exp = 0
    for k, mk in mult.items():
        exp += (k - 1) * mk * mk
        for l, ml in mult.items():
            if k != l:
                exp += min(k, l) * mk * ml
    out = q ** exp
    for mk in mult.values():
        out *= gl_order(q, mk)
    return out


def _enumerate_loop_by_blocks(quiver, dims, q):
    entries = []
    for lam in partitions(dims[0]):
        rep = jordan_rep(quiver, q, lam) if lam else zero_rep(quiver, q)
        entries.append(ClassEntry(class_key(rep), rep,
                                  centralizer_order(q, lam)))
    keys = [e.key for e in entries]
    if len(set(keys)) != len(keys):  # pragma: no cover
        raise UnsupportedError("block-size fingerprints collided")
    return entries


# --------------------------------------------------------------------------
# direct-sum decomposition
# --------------------------------------------------------------------------

def decompose_indecomposable(X):
    """Indecomposable direct summands of X as (representative, mult)
    pairs, grouped by fingerprint and deterministically ordered."""
    pieces = _decompose(X)
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


def is_indecomposable(X):
    if X.total_dim == 0:
        return False
    deco = decompose_indecomposable(X)
    return len(deco) == 1 and deco[0][1] == 1


def summand_count(X):
    return sum(m for _, m in decompose_indecomposable(X))


def _decompose(X):
    if X.total_dim == 0:
        return []
    quiver = X.quiver
    if quiver.is_edgeless():
        out = []
        for v in range(quiver.n):
            out.extend([simple_rep(quiver, X.q, quiver.vertices[v])]
                       * X.dims[v])
        return out
    if quiver.is_loop_shape():
        return _decompose_loop(X)
    if quiver.is_line_shape():
        return _decompose_line(X)
    return _decompose_generic(X)


def _decompose_loop(X):
    F = X.F
    d = X.dims[0]
    T = X.maps[0]
    ranks = [d]
    M = T
    for _ in range(d):
        ranks.append(_rank(F, M))
        M = _mul(F, M, T, d, d, d)
    ranks.append(0)
    out = []
    for k in range(1, d + 1):
        mk = ranks[k - 1] - 2 * ranks[k] + ranks[k + 1]
        out.extend([jordan_rep(X.quiver, X.q, (k,))] * mk)
    assert sum(r.total_dim for r in out) == d
    return out


def _decompose_line(X):
    F = X.F
    n = X.quiver.n

    def r(i, j):
        # rank of the composite from vertex index i to vertex index j
        if i < 0 or j >= n:
            return 0
        if i == j:
            return X.dims[i]
        M = X.maps[i]
        sdim, mdim = X.dims[i], X.dims[i + 1]
        for a in range(i + 1, j):
            M = _mul(F, M, X.maps[a], sdim, mdim, X.dims[a + 1])
            mdim = X.dims[a + 1]
        return _rank(F, M)

    out = []
    for i in range(n):
        for j in range(i, n):
            m = r(i, j) - r(i - 1, j) - r(i, j + 1) + r(i - 1, j + 1)
            assert m >= 0, "interval multiplicities must be nonnegative"
            out.extend([interval_rep(X.quiver, X.q, i, j)] * m)
    assert sum(rep.total_dim for rep in out) == X.total_dim
    return out


def _support_parts(X):
    """Vertex sets joined by arrows carrying nonzero matrices."""
    quiver = X.quiver
    parent = list(range(quiver.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(len(quiver.arrows)):
        s, t = quiver.arrow_endpoints(a)
        if any(x for row in X.maps[a] for x in row):
            parent[find(s)] = find(t)
    parts = {}
    for v in range(quiver.n):
        if X.dims[v]:
            parts.setdefault(find(v), set()).add(v)
    return list(parts.values())


def _decompose_generic(X):
    parts = _support_parts(X)
    if len(parts) > 1:
        out = []
        F = X.F
        for part in parts:
            fam = tuple(identity_matrix(X.dims[v]) if v in part else ()
                        for v in range(X.quiver.n))
            piece, _ = sub_rep(X, fam)
            out.extend(_decompose_generic(piece))
        return out
    split = _find_splitting(X)
    if split is None:
        return [X]
    S, T = split
    return _decompose_generic(S) + _decompose_generic(T)


def _find_splitting(X):
    """Search for a direct summand: a subobject S whose inclusion admits
    a retraction.  Returns (S, complement) or None."""
    F = X.F
    quiver = X.quiver
    total = X.total_dim
    fams = subobjects(X)
    fams.sort(key=lambda fam: (sum(family_dims(fam)), fam))
    for fam in fams:
        sdims = family_dims(fam)
        sd = sum(sdims)
        if sd == 0 or sd == total:
            continue
        S, incl = sub_rep(X, fam)
        # unknown retraction r: X -> S, vertex-major entries
        offs = []
        nunk = 0
        for v in range(quiver.n):
            offs.append(nunk)
            nunk += X.dims[v] * sdims[v]
        if nunk == 0:
            continue
        cols = []   # one row per unknown, columns = constraints
        rhs = []
        # (a) commuting squares: R_a * r_t = r_s * S_a
        for a in range(len(quiver.arrows)):
            s, t = quiver.arrow_endpoints(a)
            R, SA = X.maps[a], S.maps[a]
            for i in range(X.dims[s]):
                for j in range(sdims[t]):
                    row = {}
                    for k in range(X.dims[t]):
                        if R[i][k]:
                            col = offs[t] + k * sdims[t] + j
                            row[col] = F.add(row.get(col, 0), R[i][k])
                    for l in range(sdims[s]):
                        if SA[l][j]:
                            col = offs[s] + i * sdims[s] + l
                            row[col] = F.sub(row.get(col, 0), SA[l][j])
                    cols.append(row)
                    rhs.append(0)
        # (b) inclusion then retraction is the identity on S
        for v in range(quiver.n):
            for i in range(sdims[v]):
                u = fam[v][i]
                for j in range(sdims[v]):
                    row = {}
                    for k in range(X.dims[v]):
                        if u[k]:
                            col = offs[v] + k * sdims[v] + j
                            row[col] = F.add(row.get(col, 0), u[k])
                    cols.append(row)
                    rhs.append(1 if i == j else 0)
        mat = tuple(tuple(row.get(c, 0) for row in cols)
                    for c in range(nunk))
        x = express_in_rows(F, mat, tuple(rhs))
        if x is None:
            continue
        rmats = []
        for v in range(quiver.n):
            block = x[offs[v]:offs[v] + X.dims[v] * sdims[v]]
            rmats.append(tuple(
                tuple(block[i * sdims[v]:(i + 1) * sdims[v]])
                for i in range(X.dims[v])))
        retr = RepMorphism(X, S, rmats)
        comp_fam = retr.kernel_family()
        T, _ = sub_rep(X, comp_fam)
        assert S.total_dim + T.total_dim == total
        return S, T
    return None


# --------------------------------------------------------------------------
# automorphism group orders
# --------------------------------------------------------------------------

def aut_order(X):
    """|Aut(X)| from the summand structure: units of End(X) where the
    residue of End modulo its radical is a product of matrix algebras
    over the prime field (true for every family handled here, and
    cross-checked against exhaustive orbit counts in the tests)."""
    if X.total_dim == 0:
        return 1
    deco = decompose_indecomposable(X)
    dim_end = hom_dim(X, X)
    inner = sum(m * m for _, m in deco)
    out = X.q ** (dim_end - inner)
    for _, m in deco:
        out *= gl_order(X.q, m)
    return out


def find_isomorphism(X, Y, budget=200_000):
    """Brute-force search for an isomorphism over the hom-space basis;
    None when the representations are not isomorphic."""
    if X.quiver != Y.quiver or X.q != Y.q or X.dims != Y.dims:
        return None
    F = X.F
    basis = hom_space(X, Y)
    if not basis:
        return None if X.total_dim else identity_morphism(X)
    if X.q ** len(basis) > budget:
        raise SizeBoundError(
            "iso search over a %d-dimensional hom space is out of budget"
            % len(basis))
    n = X.quiver.n
    for coeff in itertools.product(F.elements, repeat=len(basis)):
        mats = []
        for v in range(n):
            M = [[0] * Y.dims[v] for _ in range(X.dims[v])]
            for c, h in zip(coeff, basis):
                if not c:
                    continue
                hm = h.mats[v]
                for i in range(X.dims[v]):
                    for j in range(Y.dims[v]):
                        if hm[i][j]:
                            M[i][j] = F.add(M[i][j], F.mul(c, hm[i][j]))
            mats.append(tuple(tuple(r) for r in M))
        phi = RepMorphism(X, Y, mats, check=False)
        if phi.is_iso():
            return phi
    return None


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def rep_to_payload(X):
    return {"dims": list(X.dims),
            "maps": [[list(row) for row in M] for M in X.maps]}


def rep_from_payload(quiver, q, payload):
    try:
        dims = payload["dims"]
        maps = payload["maps"]
    except (KeyError, TypeError):
        raise InputError("representation payload needs 'dims' and 'maps'")
    return QuiverRep(quiver, q, tuple(dims),
                     tuple(tuple(tuple(row) for row in M) for M in maps))
