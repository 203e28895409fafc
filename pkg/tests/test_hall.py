"""Product layer: corpora, convolution, split products, indicator
transforms, stable-sum torsor counts, witnesses, identity registry.

Derived anchor values here were computed with the independent oracles in
tests/oracles/ or by hand over F_2/F_3 and are frozen as literals.
"""

import random
from fractions import Fraction

import pytest

import repconf.config as cf
import repconf.hall as hl
import repconf.posets as ps
import repconf.quiver as qv
import repconf.stability as st
from repconf.classfn import IsoClassFunction
from repconf.errors import InputError


A2 = qv.line_quiver(2)
LOOP = qv.loop_quiver()


@pytest.fixture(scope="module")
def ca2():
    return hl.corpus_for(A2, 4)


@pytest.fixture(scope="module")
def cloop():
    return hl.corpus_for(LOOP, 4)


def slope_a2():
    return st.slope_condition((2, 1), (1, 1))


# --------------------------------------------------------------------------
# corpora
# --------------------------------------------------------------------------

def test_corpus_complete_against_enumeration_a2(ca2):
    # dual route: the interval-multiset class list must match brute-force
    # isomorphism classification of all representations
    for q in (2, 3):
        for dims in [(1, 0), (0, 1), (1, 1), (2, 1), (2, 2), (1, 2)]:
            found = qv.enumerate_reps(A2, dims, q)
            assert len(found) == len(ca2.classes_of_dims(dims))


def test_corpus_complete_against_enumeration_loop(cloop):
    for q in (2, 3):
        for n in (1, 2, 3):
            found = qv.enumerate_reps(LOOP, (n,), q)
            assert len(found) == len(cloop.classes_of_dims((n,)))


def test_label_roundtrip(ca2, cloop):
    for corpus, qs in ((ca2, (2, 3)), (cloop, (2, 4))):
        for cls in corpus.classes:
            for q in qs:
                assert corpus.label_of(cls.build(q)) == cls.label


def test_label_of_shuffled_rep(ca2):
    # a direct sum assembled in a different order still gets the same label
    X = qv.direct_sum(qv.simple_rep(A2, 3, "2"),
                      qv.direct_sum(qv.interval_rep(A2, 3, 0, 1),
                                    qv.simple_rep(A2, 3, "1")))
    assert ca2.label_of(X) == ("iv", ((0, 0), (0, 1), (1, 1)))


def test_sum_label(ca2, cloop):
    u = ("iv", ((0, 0),))
    v = ("iv", ((0, 1), (1, 1)))
    assert ca2.sum_label(u, v) == ("iv", ((0, 0), (0, 1), (1, 1)))
    assert cloop.sum_label(("jp", (2,)), ("jp", (3, 1))) == ("jp", (3, 2, 1))


def test_corpus_rejects_foreign_label(ca2):
    with pytest.raises(InputError):
        ca2.class_for(("jp", (2,)))


# --------------------------------------------------------------------------
# structure counts
# --------------------------------------------------------------------------

def test_subquotient_counts_small(ca2):
    # the interval has exactly one subobject of each of the three shapes
    tab = ca2.subquotient_counts(("iv", ((0, 1),)), 2)
    z = ("iv", ())
    assert tab == {
        (z, ("iv", ((0, 1),))): 1,
        (("iv", ((0, 1),)), z): 1,
        (("iv", ((1, 1),)), ("iv", ((0, 0),))): 1,
    }


def test_subquotient_counts_total(ca2):
    # counts over all pairs add up to the number of subobjects
    label = ("iv", ((0, 0), (1, 1)))
    for q in (2, 3):
        tab = ca2.subquotient_counts(label, q)
        assert sum(tab.values()) == len(qv.subobjects(
            ca2.class_for(label).build(q)))


def _direct_split_pairs(corpus, label, q):
    """Oracle: enumerate ordered complementary subobject pairs directly."""
    X = corpus.class_for(label).build(q)
    F = X.F
    subs = qv.subobjects(X)
    zero = qv.zero_family(X)
    full = qv.full_family(X)
    out = {}
    for U in subs:
        for V in subs:
            inter = qv.family_intersect(F, U, V, X.dims)
            total = qv.family_sum(F, U, V, X.dims)
            if qv.family_eq(inter, zero) and qv.family_eq(total, full):
                SU, _ = qv.sub_rep(X, U)
                SV, _ = qv.sub_rep(X, V)
                key = (corpus.label_of(SU), corpus.label_of(SV))
                out[key] = out.get(key, 0) + 1
    return out


@pytest.mark.parametrize("label", [
    ("iv", ((0, 1),)),
    ("iv", ((0, 0), (1, 1))),
    ("iv", ((0, 0), (0, 1))),
    ("iv", ((0, 0), (0, 0))),
])
def test_split_pair_counts_against_direct_enumeration_a2(ca2, label):
    # dual route: the automorphism torsor formula against raw lattice scan
    for q in (2, 3):
        assert ca2.split_pair_counts(label, q) == \
            _direct_split_pairs(ca2, label, q)


@pytest.mark.parametrize("label", [
    ("jp", (2,)),
    ("jp", (1, 1)),
    ("jp", (2, 1)),
])
def test_split_pair_counts_against_direct_enumeration_loop(cloop, label):
    for q in (2, 3):
        assert cloop.split_pair_counts(label, q) == \
            _direct_split_pairs(cloop, label, q)


def test_aut_orders_match_unit_group(ca2):
    for label in [("iv", ((0, 1),)), ("iv", ((0, 0), (1, 1)))]:
        X = ca2.class_for(label).build(2)
        assert ca2.aut(label, 2) == len(cf.unit_group(X))


# --------------------------------------------------------------------------
# products
# --------------------------------------------------------------------------

def test_unit_of_both_products(ca2):
    one = hl.delta_zero(ca2)
    f = hl.delta_point(ca2, ("iv", ((0, 1),)))
    for product in (hl.hall_product, hl.split_product):
        assert product(one, f, ca2, mode="fixed-q", q=2) == f
        assert product(f, one, ca2, mode="fixed-q", q=2) == f


def test_product_convention_subobject_first(ca2):
    # the interval has the vertex-2 simple as its subobject, the vertex-1
    # simple as its quotient; the product order must reflect that
    d1 = hl.delta_point(ca2, ("iv", ((0, 0),)))
    d2 = hl.delta_point(ca2, ("iv", ((1, 1),)))
    p21 = hl.hall_product(d2, d1, ca2, mode="fixed-q", q=3)
    p12 = hl.hall_product(d1, d2, ca2, mode="fixed-q", q=3)
    assert p21(("iv", ((0, 1),))) == 1
    assert p12(("iv", ((0, 1),))) == 0
    assert p12(("iv", ((0, 0), (1, 1)))) == 1


def test_projective_line_euler_number(ca2):
    # [derived] chi of the line of subobjects: (q+1) interpolates to 2
    dS = hl.delta_point(ca2, ("iv", ((0, 0),)))
    p = hl.hall_product(dS, dS, ca2, mode="euler")
    assert p(("iv", ((0, 0), (0, 0)))) == Fraction(2)


def test_hall_product_associative_fixed_q(ca2):
    rng = random.Random(7)
    labels = [c.label for c in ca2.classes if c.total_dim <= 2]
    for _ in range(5):
        F, G, H = (IsoClassFunction({lab: Fraction(rng.randint(-3, 3))
                                     for lab in rng.sample(labels, 3)})
                   for _ in range(3))
        for q in (2, 3):
            lhs = hl.hall_product(
                hl.hall_product(F, G, ca2, mode="fixed-q", q=q),
                H, ca2, mode="fixed-q", q=q)
            rhs = hl.hall_product(
                F, hl.hall_product(G, H, ca2, mode="fixed-q", q=q),
                ca2, mode="fixed-q", q=q)
            assert lhs == rhs


def test_split_product_commutative_and_associative(cloop):
    rng = random.Random(11)
    labels = [c.label for c in cloop.classes if c.total_dim <= 2]
    for _ in range(4):
        f = IsoClassFunction({lab: Fraction(rng.randint(-2, 2))
                              for lab in labels})
        g = IsoClassFunction({lab: Fraction(rng.randint(-2, 2))
                              for lab in labels})
        h = IsoClassFunction({labels[rng.randrange(len(labels))]:
                              Fraction(1)})
        for q in (2, 3):
            assert hl.split_product(f, g, cloop, mode="fixed-q", q=q) == \
                hl.split_product(g, f, cloop, mode="fixed-q", q=q)
            lhs = hl.split_product(
                hl.split_product(f, g, cloop, mode="fixed-q", q=q),
                h, cloop, mode="fixed-q", q=q)
            rhs = hl.split_product(
                f, hl.split_product(g, h, cloop, mode="fixed-q", q=q),
                cloop, mode="fixed-q", q=q)
            assert lhs == rhs


def test_fixed_q_needs_q(ca2):
    f = hl.delta_zero(ca2)
    with pytest.raises(InputError):
        hl.hall_product(f, f, ca2, mode="fixed-q")
    with pytest.raises(InputError):
        hl.hall_product(f, f, ca2, mode="euler-ish")


# --------------------------------------------------------------------------
# indicator functions and the alternating transform
# --------------------------------------------------------------------------

def test_delta_supports_slope(ca2):
    sc = slope_a2()
    assert set(hl.delta_ss(ca2, (1, 1), sc).support) == \
        {("iv", ((0, 1),))}
    assert set(hl.delta_st(ca2, (1, 1), sc).support) == \
        {("iv", ((0, 1),))}
    assert set(hl.delta_si(ca2, (1, 1), sc).support) == \
        {("iv", ((0, 1),))}
    # mixed-value class: only pure powers on one vertex are semistable
    assert set(hl.delta_ss(ca2, (2, 0), sc).support) == \
        {("iv", ((0, 0), (0, 0)))}


def test_delta_supports_trivial(ca2, cloop):
    sc = st.trivial_condition()
    assert set(hl.delta_ss(ca2, (1, 1), sc).support) == \
        {("iv", ((0, 1),)), ("iv", ((0, 0), (1, 1)))}
    assert set(hl.delta_st(ca2, (1, 1), sc).support) == set()
    assert set(hl.delta_si(cloop, (2,), sc).support) == {("jp", (2,))}
    assert set(hl.delta_st(cloop, (2,), sc).support) == set()


def test_epsilon_simple_class(ca2):
    sc = slope_a2()
    eps = hl.epsilon(ca2, (1, 0), sc)
    assert dict(eps.items()) == {("iv", ((0, 0),)): Fraction(1)}


def test_epsilon_on_stable_and_decomposable(ca2):
    sc = slope_a2()
    eps = hl.epsilon(ca2, (1, 1), sc)
    assert eps(("iv", ((0, 1),))) == 1
    assert eps(("iv", ((0, 0), (1, 1)))) == 0


def test_epsilon_jordan_values(cloop):
    # [derived] by hand: the one-line count inside a size-2 block is 1,
    # the line of subobjects of the split class interpolates to 2
    sc = st.trivial_condition()
    eps = hl.epsilon(cloop, (2,), sc)
    assert eps(("jp", (2,))) == Fraction(1, 2)
    assert eps(("jp", (1, 1))) == 0


def test_epsilon_equals_transform_roundtrip(cloop):
    sc = st.trivial_condition()
    for beta in [(1,), (2,), (3,)]:
        lhs = hl.delta_ss(cloop, beta, sc)
        rhs = hl.delta_ss_from_epsilon(cloop, beta, sc)
        assert lhs == rhs


def test_equal_tau_compositions(ca2):
    sc = slope_a2()
    # distinct values at the two vertices: no proper equal-value split
    assert hl.equal_tau_compositions((1, 1), sc) == [((1, 1),)]
    comps = hl.equal_tau_compositions((2, 2), sc)
    assert ((1, 1), (1, 1)) in comps and ((2, 2),) in comps
    assert all(st.compare_values(sc.tau(p), sc.tau((2, 2))) == 0
               for comp in comps for p in comp)
    triv = st.trivial_condition()
    assert len(hl.equal_tau_compositions((2, 0), triv)) == 2


# --------------------------------------------------------------------------
# system counting against the configuration machinery
# --------------------------------------------------------------------------

def _kappa(poset, dims_list):
    return {i: tuple(d) for i, d in zip(poset.labels, dims_list)}


def test_count_systems_matches_config_predicate():
    X = qv.interval_rep(A2, 2, 0, 1)
    X = qv.direct_sum(X, qv.simple_rep(A2, 2, "1"))
    poset = ps.chain((1, 2))
    kappa = _kappa(poset, [(1, 0), (1, 1)])
    plain = cf.count_config_families(X, poset, kappa)
    assert hl.count_systems(X, poset, kappa) == plain
    sc = st.trivial_condition()
    n_best = hl.count_systems(X, poset, kappa, sc, ("best",))
    assert 0 <= n_best <= plain


def test_count_systems_requires_sc_for_flags():
    X = qv.simple_rep(A2, 2, "1")
    poset = ps.chain((1,))
    with pytest.raises(InputError):
        hl.count_systems(X, poset, {1: (1, 0)}, None, ("ss",))
    with pytest.raises(InputError):
        hl.count_systems(X, poset, {1: (1, 0)}, None, ("shiny",))


def test_stable_moduli_count_against_lattice_a2_simples():
    # dual route for the independence reduction and the best gate: the
    # closed line counts against raw family enumeration with flags
    ssum = hl.stable_sum(
        A2, st.trivial_condition(),
        [(lambda q: qv.simple_rep(A2, q, "1"), 2),
         (lambda q: qv.simple_rep(A2, q, "2"), 1)])
    labels = (1, 2, 3)
    sc = st.trivial_condition()
    for poset in ps.enumerate_partial_orders(labels):
        for tmap in hl._full_type_maps(ssum, labels):
            kappa = {i: ssum.parts[tmap[i]] for i in labels}
            for q in (2, 3):
                X = ssum.build(q)
                want_plain = hl.count_systems(X, poset, kappa, sc, ("st",))
                got_plain = hl.stable_moduli_count(ssum, poset, tmap, q)
                assert got_plain == want_plain
                want_best = hl.count_systems(X, poset, kappa, sc,
                                             ("st", "best"))
                got_best = hl.stable_moduli_count(ssum, poset, tmap, q,
                                                  best=True)
                assert got_best == want_best


def test_stable_moduli_count_against_lattice_interval_powers():
    sc = slope_a2()
    ssum = hl.stable_sum(
        A2, sc, [(lambda q: qv.interval_rep(A2, q, 0, 1), 2)])
    labels = (1, 2)
    for poset in ps.enumerate_partial_orders(labels):
        tmap = {1: 0, 2: 0}
        kappa = {i: (1, 1) for i in labels}
        for q in (2, 3):
            X = ssum.build(q)
            assert hl.stable_moduli_count(ssum, poset, tmap, q) == \
                hl.count_systems(X, poset, kappa, sc, ("st",))
            assert hl.stable_moduli_count(ssum, poset, tmap, q,
                                          best=True) == \
                hl.count_systems(X, poset, kappa, sc, ("st", "best"))


def test_stable_sum_validation():
    sc = slope_a2()
    # mixed values: the two simples have different slopes
    with pytest.raises(InputError):
        hl.stable_sum(A2, sc,
                      [(lambda q: qv.simple_rep(A2, q, "1"), 1),
                       (lambda q: qv.simple_rep(A2, q, "2"), 1)])
    # non-stable piece
    with pytest.raises(InputError):
        hl.stable_sum(A2, sc,
                      [(lambda q: qv.semisimple_rep(A2, q, (1, 1)), 1)])


def test_independent_line_tuples():
    assert hl.independent_line_tuples(2, 2, 2) == 6
    assert hl.independent_line_tuples(2, 3, 5) == 0
    assert hl.independent_line_tuples(3, 1, 3) == 13
    # [derived] chi of ordered independent pairs of lines in the plane: 2
    from repconf.euler import interpolate
    chi = interpolate(lambda q: hl.independent_line_tuples(2, 2, q),
                      4, (2, 3, 4, 5, 7, 8)).at_one
    assert chi == Fraction(2)


def test_stable_flag_and_marking_values():
    ssum = hl.stable_sum(
        A2, st.trivial_condition(),
        [(lambda q: qv.simple_rep(A2, q, "1"), 2),
         (lambda q: qv.simple_rep(A2, q, "2"), 1)])
    total, _ = hl.stable_flag_sum(ssum, 0, variant="total")
    assert total == Fraction(6)
    mark, _ = hl.stable_marking_chi(ssum, 2)
    assert mark == Fraction(6)          # k!/(k-a)! = 3!/1!
    mark0, _ = hl.stable_marking_chi(ssum, 0)
    assert mark0 == Fraction(1)
    assert hl.split_decomposition_chi(ssum) == Fraction(2)


# --------------------------------------------------------------------------
# witnesses
# --------------------------------------------------------------------------

def test_sequence_witness_chain_counts():
    for q in (2, 3):
        W = hl.sequence_witness_rep(2, (1, 2, 1), q)
        e1, e2 = (1, 0), (0, 1)
        assert hl.chain_class_count(W, [e1, e2, e1]) == 1
        assert hl.chain_class_count(W, [e2, e1, e1]) == 0
        assert hl.chain_class_count(W, [e1, e1, e2]) == 0
        assert hl.chain_class_count(W, [e1, e2]) == 0


def test_sequence_witness_nilpotent_and_dims():
    W = hl.sequence_witness_rep(3, (2, 2, 3), 2)
    assert W.dims == (0, 2, 1)
    with pytest.raises(InputError):
        hl.sequence_witness_rep(2, (1, 3), 2)


def test_order_witness_count_pattern():
    labels = (1, 2, 3)
    orders = list(ps.enumerate_partial_orders(labels))
    chain = next(p for p in orders if p.is_total())
    disc = next(p for p in orders if p.is_discrete())
    assert hl.order_witness_counts(chain, chain, 2,
                                   require=("best", "st")) == 1
    assert hl.order_witness_counts(disc, chain, 2,
                                   require=("best", "st")) == 0
    # plain counts appear whenever the index order refines the witness
    assert hl.order_witness_counts(chain, disc, 2, require=("st",)) == 1
    assert hl.order_witness_counts(disc, chain, 2, require=("st",)) == 0


def test_order_witness_matrix_is_identity_2labels():
    orders, mat = hl.order_witness_matrix(2, 2)
    assert len(orders) == 3
    assert mat == [[1 if i == j else 0 for j in range(3)]
                   for i in range(3)]
    assert hl._fraction_det(mat) == 1


def test_dense_loop_quiver_shape():
    Q = hl.dense_loop_quiver(2)
    assert Q.n == 2 and len(Q.arrows) == 4
    assert Q.has_directed_cycle()


# --------------------------------------------------------------------------
# identity registry
# --------------------------------------------------------------------------

def test_identity_ids_and_unknown():
    ids = hl.identity_ids()
    assert "order-chain-inversion" in ids
    assert "composition-inverse-pair" in ids
    with pytest.raises(InputError):
        hl.run_identity_check("no-such-identity")


@pytest.mark.parametrize("ident,inst", [
    ("order-chain-inversion", {"labels": 3}),
    ("collapse-inversion", {"labels": 3, "targets": 2}),
    ("collapse-product-rule", {"labels": 3, "targets": 2}),
    ("split-decomposition-count", {}),
    ("stable-flag-count-subset", {}),
    ("stable-flag-count-exact", {}),
    ("stable-flag-count-total", {}),
    ("stable-marking-count", {}),
    ("split-into-indecomposables",
     {"quiver": "loop", "max_total": 3, "stability": "trivial"}),
    ("semistable-split-log",
     {"quiver": "loop", "max_total": 3, "stability": "trivial"}),
    ("composition-inverse-pair",
     {"quiver": "a2", "max_total": 3,
      "modes": [["fixed-q", 2], ["euler", None]]}),
    ("indecomposable-support", {"quiver": "a2", "max_total": 3}),
    ("product-concatenation", {"qs": [2], "euler": False}),
    ("best-refinement-sum", {"qs": [2, 3]}),
    ("one-point-evaluation", {"labels": 2}),
    ("witness-evaluation-rank",
     {"labels": 2, "qs": [2], "sequence_vertices": 2,
      "sequence_length": 2}),
    ("chain-pushforward-match", {}),
])
def test_identity_checks_pass(ident, inst):
    report = hl.run_identity_check(ident, inst)
    assert report["equal"], report
    assert report["identity_id"] == ident
    assert report["statement"]
    import json
    json.dumps(report)          # must be serializable as-is


def test_interleaving_identity_euler_only(ca2):
    report = hl.run_identity_check("best-product-interleaving", {})
    assert report["equal"]
    assert report["mode"] == "euler"
    # the raw counts at one field genuinely differ: that is why the
    # statement needs interpolation (frozen counterexample)
    per_q = report["per_q_counts"]["2"]
    assert per_q["lhs"] != per_q["rhs"]


def test_perturbed_coefficients_break_inversion():
    fn = hl.perturbed_n_fn()
    report = hl.run_identity_check("order-chain-inversion", {"labels": 2},
                                   n_fn=fn)
    assert not report["equal"]
    assert report["witnesses"]
    bad = report["witnesses"][0]
    assert bad["want"] != bad["sum_lower"] or bad["want"] != bad["sum_upper"]


def test_perturbation_is_localized():
    fn = hl.perturbed_n_fn(delta=0)
    report = hl.run_identity_check("order-chain-inversion", {"labels": 2},
                                   n_fn=fn)
    assert report["equal"]
