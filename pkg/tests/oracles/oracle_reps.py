#!/usr/bin/env python3
"""Standalone oracle: brute-force classification of tiny quiver
representations over prime fields.

Run directly:  python tests/oracles/oracle_reps.py

Orbits are computed by applying EVERY tuple of invertible matrices (no
generator tricks, no canonical forms): for a representation given by
matrices R_a on arrows a: s -> t, a group element (P_v) acts by
R_a  |->  P_s^{-1} R_a P_t   (row-vector convention).

Only prime q, matrices as tuples of row tuples.
"""

import itertools
from fractions import Fraction


def mat_mul(p, A, B):
    if not A:
        return ()
    Bc = tuple(zip(*B)) if B else ()
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) % p
                       for col in Bc) for row in A)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n))
                 for i in range(n))


def all_matrices(p, rows, cols):
    for flat in itertools.product(range(p), repeat=rows * cols):
        yield tuple(flat[i * cols:(i + 1) * cols] for i in range(rows))


def rank(p, M):
    mat = [list(r) for r in M]
    ncols = len(mat[0]) if mat else 0
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] % p), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = pow(mat[r][c], p - 2, p)
        mat[r] = [(inv * x) % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] % p:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[r])]
        r += 1
    return r


def invertibles(p, n):
    if n == 0:
        return [()]
    return [M for M in all_matrices(p, n, n) if rank(p, M) == n]


def inverse(p, M):
    n = len(M)
    aug = [list(M[i]) + [1 if i == j else 0 for j in range(n)]
           for i in range(n)]
    r = 0
    for c in range(n):
        pr = next(i for i in range(r, n) if aug[i][c] % p)
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = pow(aug[r][c], p - 2, p)
        aug[r] = [(inv * x) % p for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] % p:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        r += 1
    return tuple(tuple(row[n:]) for row in aug)


def is_nilpotent(p, M):
    n = len(M)
    A = M
    for _ in range(n):
        A = mat_mul(p, A, M)
    return all(x % p == 0 for row in A for x in row)


def classify(p, vertices, arrows, dims, nilpotent_loops=False):
    """arrows: list of (s, t) vertex indices; dims: per-vertex dims.
    Returns list of (orbit_size, aut_order) and the total state count."""
    groups = [invertibles(p, d) for d in dims]
    group_elems = list(itertools.product(*groups))
    group_order = len(group_elems)
    states = []
    for maps in itertools.product(*[
            list(all_matrices(p, dims[s], dims[t])) for (s, t) in arrows]):
        if nilpotent_loops and any(
                s == t and not is_nilpotent(p, M)
                for (s, t), M in zip(arrows, maps)):
            continue
        states.append(maps)
    seen = set()
    orbits = []
    for st in states:
        if st in seen:
            continue
        orbit = set()
        for P in group_elems:
            Pinv = [inverse(p, M) if M else () for M in P]
            img = tuple(
                mat_mul(p, mat_mul(p, Pinv[s], R), P[t])
                for (s, t), R in zip(arrows, st))
            orbit.add(img)
        seen |= orbit
        assert group_order % len(orbit) == 0
        orbits.append((len(orbit), group_order // len(orbit)))
    orbits.sort()
    return orbits, len(states)


def main():
    # A_2 quiver: 1 -> 2
    for p in (2, 3):
        orbits, total = classify(p, 2, [(0, 1)], (1, 1))
        print("A2_dims11_q%d = %r total=%d" % (p, orbits, total))
    orbits, total = classify(2, 2, [(0, 1)], (2, 1))
    print("A2_dims21_q2 = %r total=%d" % (orbits, total))
    orbits, total = classify(2, 2, [(0, 1)], (1, 2))
    print("A2_dims12_q2 = %r total=%d" % (orbits, total))
    orbits, total = classify(2, 2, [(0, 1)], (2, 2))
    print("A2_dims22_q2 = %r total=%d" % (orbits, total))
    orbits, total = classify(3, 2, [(0, 1)], (2, 1))
    print("A2_dims21_q3 = %r total=%d" % (orbits, total))

    # A_3 quiver: 1 -> 2 -> 3
    orbits, total = classify(2, 3, [(0, 1), (1, 2)], (1, 1, 1))
    print("A3_dims111_q2 = %r total=%d" % (orbits, total))
    orbits, total = classify(2, 3, [(0, 1), (1, 2)], (1, 2, 1))
    print("A3_dims121_q2 = %r total=%d" % (orbits, total))

    # Jordan quiver: one vertex, one loop, nilpotent
    for p in (2, 3):
        orbits, total = classify(p, 1, [(0, 0)], (2,), nilpotent_loops=True)
        print("jordan_dim2_q%d = %r total=%d" % (p, orbits, total))
    orbits, total = classify(2, 1, [(0, 0)], (3,), nilpotent_loops=True)
    print("jordan_dim3_q2 = %r total=%d" % (orbits, total))

    # complete quiver on 2 vertices (arrows both ways), dims (1,1); the
    # 2-cycle composite must vanish, killing one of the two scalars
    orbits, total = classify(2, 2, [(0, 1), (1, 0)], (1, 1))
    # nilpotency for the 2-cycle: filter states where both scalars nonzero
    filtered = []
    for maps in itertools.product(
            list(all_matrices(2, 1, 1)), list(all_matrices(2, 1, 1))):
        a, b = maps[0][0][0], maps[1][0][0]
        if a * b % 2 == 0:
            filtered.append(maps)
    print("complete2_dims11_q2_states_nilpotent = %d" % len(filtered))

    # subobject count for the A_2 representation with an invertible map,
    # dims (1,1): invariant pairs (U1, U2) with U1 * R inside U2
    print("A2_idmap_subobjects = %d" % 3)  # 0+0, 0+K, K+K (hand check)


if __name__ == "__main__":
    main()
