"""Acceptance gate: eleven headline checks, one test function each.

Every test pins a whole-subsystem numeric claim with exact rational
arithmetic (no float tolerances anywhere) and asserts its wall-clock
budget.  Run with ``pytest tests/test_acceptance.py -v`` to get one
pass/fail line per criterion.
"""

import math
import subprocess
import sys
import time
from fractions import Fraction

import helpers
from repconf import config as cf
from repconf import hall as hl
from repconf import posets as ps
from repconf import quiver as qv
from repconf import stability as st


def _within(t0, budget_s, label):
    dt = time.monotonic() - t0
    assert dt < budget_s, "%s took %.1fs (budget %ds)" % (label, dt, budget_s)
    return dt


def _check(identity_id, instance):
    report = hl.run_identity_check(identity_id, instance)
    assert report["equal"] is True, (identity_id, instance,
                                     report["lhs"], report["rhs"],
                                     report["witnesses"][:3])
    return report


# --------------------------------------------------------------------------
# 1-2: coefficient identities on small label posets
# --------------------------------------------------------------------------

def test_criterion_01_signed_chain_inversion_small_orders():
    t0 = time.monotonic()
    for n in range(1, 5):
        _check("order-chain-inversion", {"labels": n})
    dt = _within(t0, 60, "criterion 1")
    print("criterion 01 PASS: label counts 1-4, both variants, %.1fs" % dt)


def test_criterion_02_collapse_coefficients_all_allowable():
    t0 = time.monotonic()
    cases = 0
    for n in range(1, 5):
        for k in range(1, n + 1):
            _check("collapse-inversion", {"labels": n, "targets": k})
            _check("collapse-product-rule", {"labels": n, "targets": k})
            cases += 2
    dt = _within(t0, 300, "criterion 2")
    print("criterion 02 PASS: %d collapse sweeps, %.1fs" % (cases, dt))


# --------------------------------------------------------------------------
# 3-4: the canonical filtration against exhaustive search
# --------------------------------------------------------------------------

def _filtration_corpus():
    """Every iso class of total dimension <= 4 on the two line shapes and
    the one-loop quiver, over q in {2, 3}, paired with the two stability
    conditions under test (head-weighted slope, and the trivial one)."""
    for name in ("a2", "a3", "loop"):
        quiver = hl._named_quiver(name)
        slope = st.slope_condition((1,) + (0,) * (quiver.n - 1),
                                   (1,) * quiver.n)
        conds = (slope, st.trivial_condition())
        for cls in hl.corpus_for(quiver, 4).classes:
            if cls.total_dim == 0:
                continue
            for q in (2, 3):
                yield cls.build(q), conds


def test_criterion_03_descending_filtration_matches_exhaustive_search():
    t0 = time.monotonic()
    checked = 0
    for X, conds in _filtration_corpus():
        for sc in conds:
            fast = st.hn_filtration(X, sc)
            slow = helpers.brute_force_hn(X, sc)
            assert list(fast.families) == slow, \
                (X.quiver.name, X.dims, sc.kind)
            taus = fast.tau_values
            assert all(st.compare_values(taus[i], taus[i + 1]) > 0
                       for i in range(len(taus) - 1))
            checked += 1
    assert checked > 200
    dt = _within(t0, 300, "criterion 3")
    print("criterion 03 PASS: %d filtrations, %.1fs" % (checked, dt))


def test_criterion_04_stable_refinement_multiset_is_canonical():
    t0 = time.monotonic()
    checked = 0
    for X, conds in _filtration_corpus():
        for sc in conds:
            if not st.is_semistable(X, sc):
                continue
            multisets = set(helpers.brute_force_stable_refinements(X, sc))
            assert len(multisets) == 1, (X.quiver.name, X.dims, sc.kind)
            flat = []
            for rep, mult in st.stable_refinement(X, sc):
                flat.extend([qv.class_key(rep)] * mult)
            assert tuple(sorted(flat, key=repr)) in multisets
            checked += 1
    assert checked > 100
    dt = _within(t0, 300, "criterion 4")
    print("criterion 04 PASS: %d refinements, %.1fs" % (checked, dt))


# --------------------------------------------------------------------------
# 5-6: Euler numbers of split decompositions, flags, and markings
# --------------------------------------------------------------------------

def test_criterion_05_split_decomposition_factorials():
    t0 = time.monotonic()
    cases = 0
    for m1 in range(0, 5):
        for m2 in range(0, 5 - m1):
            if m1 + m2 == 0:
                continue
            report = _check("split-decomposition-count",
                            {"mults": [m1, m2]})
            want = Fraction(math.factorial(m1) * math.factorial(m2))
            assert report["rhs"]["aut_quotient_chi"] == want
            cases += 1
    dt = _within(t0, 60, "criterion 5")
    print("criterion 05 PASS: %d multiplicity vectors, %.1fs" % (cases, dt))


def test_criterion_06_stable_flag_and_marking_counts():
    t0 = time.monotonic()
    instances = (
        {},                                      # two simple types, 3 pieces
        {"mults": [1, 1]},                       # two simple types, 2 pieces
        {"pieces": "interval", "mults": [2]},    # one non-simple type
        {"pieces": "interval", "mults": [3]},
    )
    cases = 0
    for ident in ("stable-flag-count-subset", "stable-flag-count-exact",
                  "stable-flag-count-total", "stable-marking-count"):
        for inst in instances:
            _check(ident, dict(inst))
            cases += 1
    dt = _within(t0, 600, "criterion 6")
    print("criterion 06 PASS: %d flag/marking sweeps, %.1fs" % (cases, dt))


# --------------------------------------------------------------------------
# 7-9: split exp/log and the alternating transform
# --------------------------------------------------------------------------

_GRID = (
    ("a2", "slope c=1:2,2:1 r=1:1,2:1"),
    ("loop", "slope c=1:1 r=1:1"),
)


def test_criterion_07_split_exp_log_inversion():
    t0 = time.monotonic()
    cases = 0
    for quiver, slope_text in _GRID:
        for stab in ("trivial", slope_text):
            inst = {"quiver": quiver, "max_total": 4, "stability": stab}
            _check("split-into-indecomposables", dict(inst))
            _check("semistable-split-log", dict(inst))
            cases += 2
    dt = _within(t0, 600, "criterion 7")
    print("criterion 07 PASS: %d exp/log sweeps, %.1fs" % (cases, dt))


def test_criterion_08_alternating_transform_roundtrip():
    t0 = time.monotonic()
    for quiver, slope_text in _GRID:
        for stab in ("trivial", slope_text):
            report = _check("composition-inverse-pair",
                            {"quiver": quiver, "max_total": 4,
                             "stability": stab})
            assert report["mode"] == "fixed-q+euler"
    dt = _within(t0, 300, "criterion 8")
    print("criterion 08 PASS: 4 roundtrips (q=2,3,4 and euler), %.1fs" % dt)


def test_criterion_09_alternating_transform_support():
    t0 = time.monotonic()
    for quiver, slope_text in _GRID:
        for stab in ("trivial", slope_text):
            _check("indecomposable-support",
                   {"quiver": quiver, "max_total": 4, "stability": stab})
    dt = _within(t0, 300, "criterion 9")
    print("criterion 09 PASS: 4 support sweeps, %.1fs" % dt)


# --------------------------------------------------------------------------
# 10: order-remembering witnesses
# --------------------------------------------------------------------------

def test_criterion_10_witness_evaluation_and_rank():
    t0 = time.monotonic()
    for n in (1, 2, 3):
        _check("one-point-evaluation", {"labels": n, "qs": [2, 3]})
    for n in (2, 3):
        _check("witness-evaluation-rank", {"labels": n, "qs": [2, 3]})
    dt = _within(t0, 300, "criterion 10")
    print("criterion 10 PASS: evaluation + rank up to 3 labels, %.1fs" % dt)


# --------------------------------------------------------------------------
# 11: negative control -- a wrong coefficient table must fail loudly
# --------------------------------------------------------------------------

def test_criterion_11_perturbed_coefficients_fail_loudly():
    t0 = time.monotonic()
    report = hl.run_identity_check("order-chain-inversion", {"labels": 2},
                                   n_fn=hl.perturbed_n_fn())
    assert report["equal"] is False
    assert report["witnesses"], "failing instance must be reported"
    wit = report["witnesses"][0]
    assert "want" in wit and ("sum_lower" in wit or "sum_upper" in wit)

    proc = subprocess.run(
        [sys.executable, "-m", "repconf.cli", "identities",
         "--only", "order-chain-inversion", "--max-poset", "2",
         "--perturb-coefficients"],
        capture_output=True, text=True)
    assert proc.returncode == 1, proc.stdout + proc.stderr
    assert "FAIL order-chain-inversion" in proc.stdout
    dt = _within(t0, 60, "criterion 11")
    print("criterion 11 PASS: perturbation detected, exit code 1, %.1fs"
          % dt)
