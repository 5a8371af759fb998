from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import polys
from ptfkit import MultilinearPoly, ZeroPolynomialError, max_influence, restrict
from ptfkit.families import parity_poly, random_poly, sum_poly
from ptfkit.fourier import influence_real, l2sq, split_variable
from ptfkit.regularize import (
    DecisionTree,
    build_tree,
    budget_sufficient,
    default_alpha,
    greedy_restrict,
    ptf_influence_audit,
    query_tree,
    random_tree,
    s_alpha,
    v_alpha,
)

alphas = st.fractions(min_value=0, max_value=3, max_denominator=5)


# potential

def test_v_alpha_examples():
    a = Fraction(1, 3)
    assert v_alpha(parity_poly(2), a) == ((1 + a) ** 2, (1 + a) ** 2)
    p = MultilinearPoly.linear([1], 1)
    assert v_alpha(p, a) == (2 + a, (2 + a) / 2)


def test_s_alpha_zero_polynomial():
    assert v_alpha(MultilinearPoly(3), 1) == (0, None)
    with pytest.raises(ZeroPolynomialError):
        s_alpha(MultilinearPoly(3), 1)


@given(polys(max_n=5), alphas)
def test_v_alpha_matches_oracle(p, a):
    assert v_alpha(p, a)[0] == oracles.v_alpha(p, a)


@given(polys(max_n=6), alphas, st.data())
def test_v_alpha_restriction_average(p, a, data):
    i = data.draw(st.integers(1, p.n))
    f1, _ = split_variable(p, i)
    plus = v_alpha(restrict(p, {i: 1}), a)[0]
    minus = v_alpha(restrict(p, {i: -1}), a)[0]
    assert (plus + minus) / 2 == v_alpha(p, a)[0] - a * v_alpha(f1, a)[0]


@given(polys(max_n=6), alphas, st.data())
def test_best_sign_decreases_s_alpha(p, a, data):
    i = data.draw(st.integers(1, p.n))
    vals = []
    for b in (1, -1):
        r = restrict(p, {i: b})
        if not r.is_zero():
            vals.append(s_alpha(r, a))
    # a zero restriction can only happen when the other side carries everything
    assert min(vals) <= s_alpha(p, a) - a * influence_real(p, i)


@given(polys(max_n=6), alphas)
def test_s_alpha_bounded_by_degree(p, a):
    assert s_alpha(p, a) <= (1 + a) ** p.degree


# greedy

def test_default_alpha():
    assert default_alpha(2) == 1 and default_alpha(4) == Fraction(1, 3)
    assert default_alpha(1) == 1 and default_alpha(0) == 1


def test_greedy_already_regular():
    p = sum_poly(10)
    report, out = greedy_restrict(p, Fraction(1, 5))
    assert report.k == 0 and out == p


def test_greedy_product_of_two():
    report, out = greedy_restrict(parity_poly(2), Fraction(1, 2))
    assert report.k == 2
    assert report.final_inf == 0
    assert out.degree == 0 and out.n == 0
    assert report.k <= math.ceil(2 * math.e / 0.5)
    # ties go to the smallest index and to the + sign
    assert report.variables == [1, 2] and report.steps[0].sign == 1


def test_greedy_rejects_zero_and_bad_delta():
    with pytest.raises(ZeroPolynomialError):
        greedy_restrict(MultilinearPoly(2), Fraction(1, 2))
    with pytest.raises(ValueError):
        greedy_restrict(parity_poly(2), 0)


def test_greedy_random_degree2_corpus():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        p = random_poly(12, 2, rng)
        report, out = greedy_restrict(p, Fraction(1, 5))
        assert out.is_zero() or max_influence(out)[0] <= Fraction(1, 5)
        assert report.k <= 12


def _check_greedy_contract(p, delta):
    report, out = greedy_restrict(p, delta)
    alpha = report.alpha
    assert report.final_inf <= delta
    assert report.k <= report.step_bound
    assert report.k <= report.alpha_step_bound
    for step in report.steps:
        assert step.s_before - step.s_after >= alpha * step.influence
    check = restrict(p, report.assignment)
    assert check == out
    assert out.is_zero() or max_influence(out)[0] <= delta


@given(polys(max_n=8, max_degree=3), st.sampled_from([Fraction(1, 10), Fraction(3, 10), Fraction(1, 2)]))
def test_greedy_contract_property(p, delta):
    _check_greedy_contract(p, delta)


def test_report_json_has_trace():
    report, _ = greedy_restrict(parity_poly(3), Fraction(1, 2))
    data = report.to_json()
    assert data["k"] == 3 and len(data["steps"]) == 3
    assert all(isinstance(s["s_before"], str) for s in data["steps"])


# trees

def test_tree_regular_input_is_single_leaf():
    tree = build_tree(sum_poly(9), Fraction(1, 5), Fraction(1, 10), 9)
    leaves = tree.leaves()
    assert len(leaves) == 1 and leaves[0].status == "closed" and leaves[0].depth == 0
    assert tree.open_mass() == 0


def test_tree_triple_product_all_closed():
    tree = build_tree(parity_poly(3), Fraction(1, 2), Fraction(1, 10), 3)
    leaves = tree.leaves()
    assert tree.open_mass() == 0
    assert all(l.status == "closed" for l in leaves)
    # a leaf like +-x3 still has influence 1, so closing needs every variable fixed
    assert all(l.poly.degree == 0 for l in leaves)
    assert tree.depth == 3


def test_tree_budget_zero_reports_open_root():
    tree = build_tree(parity_poly(3), Fraction(1, 2), Fraction(1, 10), 0)
    assert tree.open_mass() == 1 and tree.leaves()[0].is_open


def _check_tree(p, delta, tree):
    tree.validate()
    assert tree.total_measure() == 1
    for leaf in tree.leaves():
        fresh = restrict(p, leaf.assignment)
        if leaf.status == "closed" and not fresh.is_zero():
            assert max_influence(fresh)[0] <= delta


def test_tree_random_degree2_open_mass():
    rng = np.random.default_rng(7)
    delta = Fraction(3, 10)
    for _ in range(5):
        p = random_poly(14, 2, rng)
        tree = build_tree(p, delta, Fraction(1, 10), 14)
        _check_tree(p, delta, tree)
        assert tree.open_mass() <= Fraction(1, 10)


@given(polys(max_n=7, max_degree=3), st.integers(0, 7))
def test_tree_invariants_property(p, budget):
    delta = Fraction(1, 3)
    tree = build_tree(p, delta, Fraction(1, 10), budget)
    _check_tree(p, delta, tree)
    assert tree.depth <= min(budget, p.n)


def test_tree_json_round_trip():
    p = random_poly(6, 2, 3)
    tree = build_tree(p, Fraction(1, 4), Fraction(1, 10), 6)
    data = tree.to_json()
    back = DecisionTree.from_json(data, p)
    back.validate()
    assert [l.assignment for l in back.leaves()] == [l.assignment for l in tree.leaves()]
    assert back.open_mass() == tree.open_mass()


def test_depth_formulas_are_reported():
    tree = build_tree(parity_poly(3), Fraction(1, 2), Fraction(1, 10), 3)
    assert tree.params["stated_depth"] > 0
    assert tree.params["proof_depth"] >= tree.params["stated_depth"]
    assert budget_sufficient(tree)


def test_query_and_random_trees():
    t = query_tree(4, [2, 4])
    t.validate()
    assert len(t.leaves()) == 4 and t.total_measure() == 1
    assert t.leaf_of((1, -1, 1, 1)).assignment == {2: -1, 4: 1}
    r = random_tree(8, 4, 0)
    r.validate()
    assert r.total_measure() == 1 and r.depth <= 4


# audit

def test_audit_dictator():
    out = ptf_influence_audit(MultilinearPoly.variable(1, 1))
    assert out["inf_poly"] == 1 and out["inf_sign"] == 1


def test_audit_biased_constant_sign():
    out = ptf_influence_audit(MultilinearPoly.linear([Fraction(1, 2)], 1))
    assert out["inf_poly"] == Fraction(1, 5) and out["inf_sign"] == 0


def test_audit_scaled_sum():
    out = ptf_influence_audit(sum_poly(9, Fraction(1, 3)))
    assert out["inf_poly"] == Fraction(1, 9)
    assert out["inf_sign"] == Fraction(math.comb(8, 4), 2 ** 8) == Fraction(70, 256)


def test_audit_refuses_zeros():
    with pytest.raises(ValueError):
        ptf_influence_audit(sum_poly(2))
    out = ptf_influence_audit(sum_poly(2), allow_zeros=True)
    assert out["zero_count"] == 2


def test_l2sq_average_identity_on_corpus():
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = random_poly(10, 3, rng)
        for i in range(1, 11):
            assert (l2sq(restrict(p, {i: 1})) + l2sq(restrict(p, {i: -1}))) / 2 == l2sq(p)
