from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import polys, tables
from ptfkit import (
    BooleanFn,
    CapExceeded,
    DimensionError,
    MultilinearPoly,
    PartialAssignment,
    PreconditionError,
    RealPoly,
    ZeroPolynomialError,
    compose_linear,
    evaluate,
    influence_bool,
    influence_real,
    inverse_walsh,
    max_influence,
    restrict,
    stats,
    walsh_transform,
)
from ptfkit.families import majority3_poly, majority_fn, parity_fn, parity_poly
from ptfkit.fourier import cube_values_fraction, l2sq
from ptfkit.io import poly_from_json, poly_to_json


def P(n, monomials):
    return MultilinearPoly.from_monomials(n, monomials)


# eval

def test_eval_single_monomial():
    assert evaluate(P(2, [((1, 2), 1)]), (1, -1)) == -1


def test_eval_direct_substitution():
    p = P(3, [((), 1), ((1,), 2), ((2, 3), -1)])
    assert evaluate(p, (-1, 1, 1)) == -2


def test_eval_square_of_sum_multilinearized():
    s = MultilinearPoly.linear([1, 1, 1])
    sq = s * s
    assert sq == P(3, [((), 3), ((1, 2), 2), ((1, 3), 2), ((2, 3), 2)])
    assert evaluate(sq, (1, 1, 1)) == 9


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(P(2, [((1,), 1)]), (1, 1, 1))
    with pytest.raises(DimensionError):
        evaluate(P(2, [((1,), 1)]), (1, 0))


@given(polys())
def test_eval_matches_oracle(p):
    assert cube_values_fraction(p) == oracles.values(p)


# stats

@pytest.mark.parametrize("p, expected", [
    (MultilinearPoly.linear([1, 1]), dict(l2sq=2, variance=2, weight=2, degree=1)),
    (MultilinearPoly.constant(2, 3), dict(l2sq=9, variance=0, weight=0, degree=0)),
    (P(3, [((), 1), ((1,), 2), ((2, 3), -1)]), dict(l2sq=6, variance=5, weight=3, degree=2)),
])
def test_stats_examples(p, expected):
    s = stats(p)
    for key, val in expected.items():
        assert s[key] == val


@given(polys(max_n=7))
def test_parseval(p):
    assert l2sq(p) == oracles.mean_square(p)


def test_canonical_form_drops_zeros():
    p = P(2, [((1,), 1), ((1,), -1), ((2,), 0)])
    assert p.is_zero() and len(p) == 0
    assert p == MultilinearPoly(2)
    assert P(2, [((1,), Fraction(2, 4))]) == P(2, [((1,), Fraction(1, 2))])


def test_monomial_beyond_n_rejected():
    with pytest.raises(DimensionError):
        MultilinearPoly(2, {0b100: 1})


# influences

def test_influence_real_examples():
    assert influence_real(MultilinearPoly.variable(1, 1), 1) == 1
    assert influence_real(MultilinearPoly.linear([1], 1), 1) == Fraction(1, 2)
    f = P(3, [((1, 2), 1), ((2, 3), 2)])
    assert influence_real(f, 1) == Fraction(1, 5)
    assert influence_real(f, 2) == 1


def test_influence_real_zero_polynomial():
    with pytest.raises(ZeroPolynomialError):
        influence_real(MultilinearPoly(2), 1)


@given(polys(max_n=5), st.data())
def test_influence_real_matches_oracle(p, data):
    i = data.draw(st.integers(1, p.n))
    assert influence_real(p, i) == oracles.real_influence(p, i)


def test_influence_bool_examples():
    maj = majority_fn(3)
    assert all(influence_bool(maj, i) == Fraction(1, 2) for i in (1, 2, 3))
    par = parity_fn(5)
    assert all(influence_bool(par, i) == 1 for i in range(1, 6))
    const = BooleanFn.constant(4)
    assert all(influence_bool(const, i) == 0 for i in range(1, 5))


@given(tables(max_n=6), st.data())
def test_influence_bool_equals_fourier_weight(nt, data):
    n, bits = nt
    h = BooleanFn(n, bits)
    i = data.draw(st.integers(1, n))
    w = walsh_transform(h)
    fourier = sum((c * c for m, c in w.items() if (m >> (i - 1)) & 1), Fraction(0))
    assert influence_bool(h, i) == fourier == oracles.bool_influence(bits, n, i)


def test_max_influence_examples():
    assert max_influence(MultilinearPoly.linear([1, 2])) == (Fraction(4, 5), 2)
    assert max_influence(parity_poly(4)) == (1, 1)
    assert max_influence(BooleanFn.constant(3))[0] == 0


def test_max_influence_tie_prefers_smallest_index():
    assert max_influence(MultilinearPoly.linear([1, 3, 3]))[1] == 2
    assert max_influence(majority_fn(5))[1] == 1


# restrict

def test_restrict_examples():
    assert restrict(P(2, [((1, 2), 1)]), {1: -1}) == P(1, [((1,), -1)])
    assert restrict(P(2, [((), 1), ((1,), 1), ((1, 2), 1)]), {1: 1}) == P(1, [((), 2), ((1,), 1)])


def test_restrict_majority():
    r = restrict(majority3_poly(), {3: 1})
    expected = P(2, [((), Fraction(1, 2)), ((1,), Fraction(1, 2)), ((2,), Fraction(1, 2)), ((1, 2), Fraction(-1, 2))])
    assert r == expected
    # sign table is OR: -1 only when both free inputs are -1
    assert BooleanFn.sign_of(r) == majority_fn(3).restrict({3: 1})
    assert list(BooleanFn.sign_of(r).table) == [-1, 1, 1, 1]


def test_restrict_out_of_range():
    with pytest.raises(DimensionError):
        restrict(P(2, [((1,), 1)]), {3: 1})


def test_partial_assignment_validation():
    with pytest.raises(ValueError):
        PartialAssignment({1: 0})
    a = PartialAssignment({2: 1})
    with pytest.raises(ValueError):
        a.extend(2, -1)
    assert a.free_variables(3) == [1, 3]


@given(polys(max_n=6), st.data())
def test_restrict_agrees_with_substitution(p, data):
    vars_ = data.draw(st.lists(st.integers(1, p.n), unique=True, max_size=p.n))
    bindings = {v: data.draw(st.sampled_from([-1, 1])) for v in vars_}
    r = restrict(p, bindings)
    assert r.degree <= p.degree
    assert cube_values_fraction(r) == oracles.restricted_values(p, bindings)


@given(polys(max_n=6), st.data())
def test_restriction_averaging(p, data):
    i = data.draw(st.integers(1, p.n))
    avg = (l2sq(restrict(p, {i: 1})) + l2sq(restrict(p, {i: -1}))) / 2
    assert avg == l2sq(p)


# compose_linear

def test_compose_square_of_sum():
    G = RealPoly(1, {(2,): 1})
    out = compose_linear(G, [MultilinearPoly.linear([1, 1])])
    assert out == P(2, [((), 2), ((1, 2), 2)])


def test_compose_product_and_identity():
    G = RealPoly(2, {(1, 1): 1})
    out = compose_linear(G, [MultilinearPoly.variable(2, 1), MultilinearPoly.variable(2, 2)])
    assert out == P(2, [((1, 2), 1)])
    g = MultilinearPoly.linear([2, -3, Fraction(1, 2)], 1)
    assert compose_linear(RealPoly(1, {(1,): 1}), [g]) == g


def test_compose_rejects_nonlinear_forms():
    with pytest.raises(PreconditionError):
        compose_linear(RealPoly(1, {(1,): 1}), [parity_poly(2)])
    with pytest.raises(DimensionError):
        compose_linear(RealPoly(2, {(1, 1): 1}), [MultilinearPoly.variable(2, 1)])


linear_forms = st.builds(
    lambda n, coefs, c: MultilinearPoly.linear(coefs[:n], c),
    st.just(4),
    st.lists(st.integers(-3, 3), min_size=4, max_size=4),
    st.integers(-2, 2),
)


@given(st.lists(linear_forms, min_size=2, max_size=2),
       st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-3, 3), max_size=5))
def test_compose_agrees_pointwise(forms, terms):
    G = RealPoly(2, terms)
    out = compose_linear(G, forms)
    for x in oracles.points(4):
        z = [evaluate(g, x) for g in forms]
        direct = sum(Fraction(c) * z[0] ** a * z[1] ** b for (a, b), c in terms.items())
        assert evaluate(out, x) == direct


# walsh transform

def test_walsh_parity():
    assert walsh_transform(parity_fn(4)) == parity_poly(4)


def test_walsh_and2():
    h = BooleanFn(2, [-1, -1, -1, 1])
    half = Fraction(1, 2)
    assert walsh_transform(h) == P(2, [((), -half), ((1,), half), ((2,), half), ((1, 2), half)])


@given(tables(max_n=7))
def test_walsh_round_trip_and_parseval(nt):
    n, bits = nt
    h = BooleanFn(n, bits)
    w = walsh_transform(h)
    assert inverse_walsh(w) == h
    assert l2sq(w) == 1
    assert dict(w.items()) == oracles.fourier_coefficients(bits, n)


def test_from_cube_values_float_and_exact():
    vals = [0.5, -1.0, 2.0, 0.25]
    p = MultilinearPoly.from_cube_values(vals)
    assert np.allclose(p.cube_values(), vals)
    q = MultilinearPoly.from_cube_values([Fraction(1, 3), 1, 0, -2])
    assert cube_values_fraction(q) == [Fraction(1, 3), 1, 0, -2]


# booleans and io

def test_sign_of_rejects_zeros():
    p = MultilinearPoly.linear([1, 1])
    with pytest.raises(PreconditionError):
        BooleanFn.sign_of(p)
    h = BooleanFn.sign_of(p, allow_zeros=True)
    assert h.zero_count == 2 and list(h.table) == [-1, 1, 1, 1]


@given(tables(max_n=6))
def test_hex_round_trip(nt):
    n, bits = nt
    h = BooleanFn(n, bits)
    assert BooleanFn.from_hex(n, h.to_hex()) == h


def test_hex_lsb_is_all_minus_point():
    h = BooleanFn.from_hex(2, "1")
    assert h((-1, -1)) == 1 and h((1, 1)) == -1


@given(polys())
def test_poly_json_round_trip(p):
    data = poly_to_json(p)
    assert all(isinstance(t["coef"], str) for t in data["terms"])
    assert poly_from_json(data) == p


def test_cube_values_large_coefficients_stay_exact():
    big = 10 ** 30
    p = P(2, [((1,), big), ((2,), Fraction(1, 3))])
    assert cube_values_fraction(p) == [-big - Fraction(1, 3), big - Fraction(1, 3),
                                       -big + Fraction(1, 3), big + Fraction(1, 3)]


def test_enumeration_cap(monkeypatch):
    monkeypatch.setenv("PTFKIT_MAX_N", "4")
    with pytest.raises(CapExceeded):
        BooleanFn.constant(5)
