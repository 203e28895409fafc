"""Small finite fields F_q and exact linear algebra over them.

Everything here is exact integer arithmetic; no floats anywhere.

Field elements are encoded as ints 0..q-1.  For prime q the encoding is the
obvious one (mod-q classes).  For the prime-power sizes 4, 8, 9 elements are
polynomial residues packed into an int:

    q = 4:  bits (b1, b0) encode b1*x + b0   over F_2, modulo x^2 + x + 1
    q = 8:  bits (b2, b1, b0)                over F_2, modulo x^3 + x + 1
    q = 9:  base-3 digits (d1, d0)           over F_3, modulo x^2 + 1

All four operations are table lookups after construction, so they are cheap
inside the enumeration loops that dominate this package's runtime.

Linear-algebra conventions (used consistently across the package):
  * vectors are ROW tuples;
  * a linear map from F^m to F^n is an m-by-n matrix M acting by v |-> v*M;
  * composition "f then g" is therefore mat_mul(M_f, M_g);
  * a subspace is identified with its canonical reduced-row-echelon basis
    (a tuple of row tuples), so subspaces compare equal iff they are equal.
"""

from __future__ import annotations

import itertools

from .errors import InputError

__all__ = [
    "GF", "field", "mat_mul", "mat_vec", "transpose", "identity_matrix",
    "zero_matrix", "rref", "rank", "left_kernel", "annihilator",
    "express_in_rows", "mat_inverse", "span", "sub_sum", "sub_intersect",
    "in_span", "sub_contains", "complete_basis", "coords",
    "enumerate_vectors", "enumerate_subspaces", "all_subspaces",
    "enumerate_matrices", "gl_order", "q_binomial", "SUPPORTED_Q",
]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                 53, 59, 61)
SUPPORTED_Q = tuple(sorted(_SMALL_PRIMES + (4, 8, 9)))


def _gf2k_mul(a, b, red, k):
    # carry-less multiply with reduction by the degree-k polynomial `red`
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> k & 1:
            a ^= red
    return r


class GF:
    """Arithmetic tables for one finite field; use field(q) to get the
    cached instance."""

    def __init__(self, q):
        if q in _SMALL_PRIMES:
            p, add, mul = q, lambda a, b: (a + b) % q, lambda a, b: (a * b) % q
        elif q == 4:
            p = 2
            add = lambda a, b: a ^ b
            mul = lambda a, b: _gf2k_mul(a, b, 0b111, 2)
        elif q == 8:
            p = 2
            add = lambda a, b: a ^ b
            mul = lambda a, b: _gf2k_mul(a, b, 0b1011, 3)
        elif q == 9:
            p = 3

            def add(a, b):
                return (a // 3 + b // 3) % 3 * 3 + (a + b) % 3

            def mul(a, b):
                a1, a0, b1, b0 = a // 3, a % 3, b // 3, b % 3
                # (a1 x + a0)(b1 x + b0) with x^2 = -1
                hi = (a1 * b0 + a0 * b1) % 3
                lo = (a0 * b0 - a1 * b1) % 3
                return hi * 3 + lo
        else:
            raise InputError("unsupported field size %r (supported: %r)"
                             % (q, SUPPORTED_Q))
        self.q = q
        self.p = p
        self._add = tuple(tuple(add(a, b) for b in range(q)) for a in range(q))
        self._mul = tuple(tuple(mul(a, b) for b in range(q)) for a in range(q))
        neg = [0] * q
        inv = [None] * q
        for a in range(q):
            for b in range(q):
                if self._add[a][b] == 0:
                    neg[a] = b
                if self._mul[a][b] == 1:
                    inv[a] = b
        self._neg = tuple(neg)
        self._inv = tuple(inv)
        self.elements = tuple(range(q))

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.q)
        return self._inv[a]

    def __repr__(self):
        return "GF(%d)" % self.q


_FIELDS = {}


def field(q):
    got = _FIELDS.get(q)
    if got is None:
        got = _FIELDS[q] = GF(q)
    return got


# --------------------------------------------------------------------------
# matrices (tuples of row tuples)
# --------------------------------------------------------------------------

def zero_matrix(rows, cols):
    return tuple((0,) * cols for _ in range(rows))


def identity_matrix(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n))
                 for i in range(n))


def transpose(M):
    return tuple(zip(*M)) if M else ()


def mat_vec(F, v, M):
    # row vector times matrix
    mul, addt = F._mul, F._add
    out = []
    for col in zip(*M):
        acc = 0
        for a, b in zip(v, col):
            acc = addt[acc][mul[a][b]]
        out.append(acc)
    return tuple(out)


def mat_mul(F, A, B):
    if not A:
        return ()
    mul, addt = F._mul, F._add
    Bcols = tuple(zip(*B)) if B else ()
    out = []
    for row in A:
        orow = []
        for col in Bcols:
            acc = 0
            for a, b in zip(row, col):
                acc = addt[acc][mul[a][b]]
            orow.append(acc)
        out.append(tuple(orow))
    return tuple(out)


def mat_add(F, A, B):
    addt = F._add
    return tuple(tuple(addt[a][b] for a, b in zip(ra, rb))
                 for ra, rb in zip(A, B))


def rref(F, rows, ncols=None):
    """Reduced row echelon form.  Returns (rows, pivot_columns) with zero
    rows dropped; the result is the canonical basis of the row space."""
    mat = [list(r) for r in rows]
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    piv = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        s = F.inv(mat[r][c])
        mat[r] = [F.mul(s, x) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [F.sub(x, F.mul(f, y))
                          for x, y in zip(mat[i], mat[r])]
        piv.append(c)
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r]), tuple(piv)


def rank(F, rows):
    return len(rref(F, rows)[0])


def left_kernel(F, M, nrows=None):
    """Canonical basis of {x : x * M = 0} for an nrows-by-ncols matrix M."""
    if nrows is None:
        nrows = len(M)
    if nrows == 0:
        return ()
    # x * M = 0  <=>  (M^T) x^T = 0: row-reduce M^T and read off free vars
    R, piv = rref(F, transpose(M), ncols=nrows)
    pivset = set(piv)
    basis = []
    for free in range(nrows):
        if free in pivset:
            continue
        v = [0] * nrows
        v[free] = 1
        for r, c in enumerate(piv):
            v[c] = F.neg(R[r][free])
        basis.append(tuple(v))
    return rref(F, basis, ncols=nrows)[0]


def annihilator(F, U, n):
    """Canonical basis of {y in F^n : u . y = 0 for every row u of U}."""
    if not U:
        return rref(F, identity_matrix(n), ncols=n)[0]
    return left_kernel(F, transpose(U), nrows=n)


def express_in_rows(F, rows, v):
    """Coefficients x with x * rows = v, or None if v is outside the span."""
    n = len(v)
    aug = [list(r) + [1 if i == j else 0 for j in range(len(rows))]
           for i, r in enumerate(rows)]
    R, _ = rref(F, aug)
    # reduce v against the left part, tracking the right part
    residue = list(v)
    coeff = [0] * len(rows)
    for row in R:
        lead = next((c for c in range(n) if row[c]), None)
        if lead is None or not residue[lead]:
            continue
        f = residue[lead]
        for c in range(n):
            residue[c] = F.sub(residue[c], F.mul(f, row[c]))
        for c in range(len(rows)):
            coeff[c] = F.add(coeff[c], F.mul(f, row[n + c]))
    if any(residue):
        return None
    return tuple(coeff)


def mat_inverse(F, M):
    """Inverse of a square matrix, or None."""
    n = len(M)
    aug = [list(M[i]) + [1 if i == j else 0 for j in range(n)]
           for i in range(n)]
    R, piv = rref(F, aug)
    if len(R) < n or list(piv[:n]) != list(range(n)):
        return None
    return tuple(tuple(row[n:]) for row in R)


# --------------------------------------------------------------------------
# subspaces (canonical rref row tuples)
# --------------------------------------------------------------------------

def span(F, vectors, n=None):
    if n is None:
        vectors = tuple(vectors)
        if not vectors:
            raise InputError("ambient dimension needed for an empty span")
        n = len(vectors[0])
    return rref(F, vectors, ncols=n)[0]


def sub_sum(F, U, V, n=None):
    return span(F, tuple(U) + tuple(V), n=n)


def sub_intersect(F, U, V, n):
    # double annihilator: (U^perp + V^perp)^perp
    return annihilator(F, sub_sum(F, annihilator(F, U, n),
                                  annihilator(F, V, n), n=n), n)


def in_span(F, U, v):
    residue = list(v)
    for row in U:
        lead = next((c for c in range(len(v)) if row[c]), None)
        if lead is not None and residue[lead]:
            f = residue[lead]
            for c in range(len(v)):
                residue[c] = F.sub(residue[c], F.mul(f, row[c]))
    return not any(residue)


def sub_contains(F, U, V):
    """Row space of U contains that of V."""
    return all(in_span(F, U, v) for v in V)


def complete_basis(F, inner, outer):
    """Rows of `outer`'s span extending a basis of `inner` to one of the
    larger space; requires containment."""
    if not sub_contains(F, outer, inner):
        raise InputError("first space is not inside the second")
    chosen = list(inner)
    added = []
    for v in outer:
        if not in_span(F, span(F, chosen, n=len(v)) if chosen else (), v):
            chosen.append(v)
            added.append(v)
    return tuple(added)


def coords(F, basis, v):
    x = express_in_rows(F, basis, v)
    if x is None:
        raise InputError("vector lies outside the given basis span")
    return x


# --------------------------------------------------------------------------
# enumeration and counting
# --------------------------------------------------------------------------

def enumerate_vectors(F, n):
    return itertools.product(F.elements, repeat=n)


def enumerate_matrices(F, rows, cols):
    for flat in itertools.product(F.elements, repeat=rows * cols):
        yield tuple(flat[i * cols:(i + 1) * cols] for i in range(rows))


def enumerate_subspaces(F, n, k):
    """All k-dimensional subspaces of F^n, one canonical rref basis each."""
    if k == 0:
        yield ()
        return
    for piv in itertools.combinations(range(n), k):
        pivset = set(piv)
        # free positions: to the right of the row's pivot, not a pivot column
        free = [(r, c) for r in range(k) for c in range(piv[r] + 1, n)
                if c not in pivset]
        for vals in itertools.product(F.elements, repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r in range(k):
                rows[r][piv[r]] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            yield tuple(tuple(r) for r in rows)


def all_subspaces(F, n):
    for k in range(n + 1):
        yield from enumerate_subspaces(F, n, k)


def gl_order(q, n):
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def q_binomial(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den
