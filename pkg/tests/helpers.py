"""Shared brute-force oracles used by several test modules.

These deliberately avoid the library's own recursions: filtrations and
refinements are found by exhaustive search over subobject chains, so
agreement with the fast routines is meaningful evidence.
"""

from repconf import quiver as qv
from repconf import stability as sb


def brute_force_filtrations(X, sc):
    """Every ascending chain 0 = A_0 < ... < A_n = X (as families) whose
    factors are semistable with strictly descending values."""
    F = X.F
    subs = qv.subobjects(X)
    results = []

    def extend(chain, last_tau):
        last = chain[-1]
        if qv.family_dims(last) == tuple(X.dims):
            results.append(list(chain))
            return
        for fam in subs:
            if qv.family_dims(fam) == qv.family_dims(last):
                continue
            if not qv.family_leq(F, last, fam):
                continue
            if fam == last:
                continue
            factor = sb.section_factor(X, last, fam)
            if factor.total_dim == 0:
                continue
            t = sc.tau(factor.dims)
            if last_tau is not None and \
                    sb.compare_values(last_tau, t) <= 0:
                continue
            if not sb.is_semistable(factor, sc):
                continue
            chain.append(fam)
            extend(chain, t)
            chain.pop()

    extend([qv.zero_family(X)], None)
    return results


def brute_force_hn(X, sc):
    """The unique chain found by exhaustive search; asserts uniqueness."""
    found = brute_force_filtrations(X, sc)
    assert len(found) == 1, \
        "expected exactly one descending-semistable chain, found %d" \
        % len(found)
    return found[0]


def brute_force_stable_refinements(X, sc):
    """All multisets of factor keys over chains with stable factors of
    value equal to the total object's value."""
    F = X.F
    subs = qv.subobjects(X)
    t_all = sc.tau(X.dims)
    results = []

    def extend(chain, keys):
        last = chain[-1]
        if qv.family_dims(last) == tuple(X.dims):
            results.append(tuple(sorted(keys, key=repr)))
            return
        for fam in subs:
            if not qv.family_leq(F, last, fam):
                continue
            if qv.family_dims(fam) == qv.family_dims(last):
                continue
            factor = sb.section_factor(X, last, fam)
            if factor.total_dim == 0:
                continue
            if sb.compare_values(sc.tau(factor.dims), t_all) != 0:
                continue
            if sb.classify(factor, sc) != "stable":
                continue
            chain.append(fam)
            keys.append(qv.class_key(factor))
            extend(chain, keys)
            keys.pop()
            chain.pop()

    extend([qv.zero_family(X)], [])
    return results


def corpus_a2_loop(qs=(2, 3), max_total=3):
    """Every class of the two-vertex line quiver and the one-loop quiver
    up to the given total dimension, over the given fields."""
    out = []
    A2 = qv.line_quiver(2)
    LOOP = qv.loop_quiver()
    for q in qs:
        for d1 in range(max_total + 1):
            for d2 in range(max_total + 1 - d1):
                if d1 + d2 == 0:
                    continue
                for e in qv.enumerate_reps(A2, (d1, d2), q):
                    out.append(e.rep)
        for d in range(1, max_total + 1):
            for e in qv.enumerate_reps(LOOP, (d,), q):
                out.append(e.rep)
    return out
