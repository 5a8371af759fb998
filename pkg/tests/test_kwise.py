from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import polys, tables
from ptfkit import BooleanFn, MultilinearPoly, walsh_transform
from ptfkit.errors import CapExceeded
from ptfkit.families import majority_fn, random_poly
from ptfkit.kwise import (
    KWiseDistribution,
    SandwichPair,
    check_pointwise,
    equidistributed,
    fooling_error,
    full_cube,
    generate_kwise,
    leafwise_fooling,
    load_distribution,
    sandwich_certificate,
    save_distribution,
    verify_kwise,
)
from ptfkit.regularize import query_tree, random_tree
from ptfkit import gf2m


def rows(K):
    return [tuple(int(v) for v in r) for r in K.points()]


# field arithmetic

@pytest.mark.parametrize("m", range(1, 9))
def test_field_is_a_field(m):
    size = 1 << m
    mul = gf2m.mul_table(m)
    for a in range(1, size):
        assert sorted(int(mul[a, b]) for b in range(1, size)) == list(range(1, size))
    tr = gf2m.trace_table(m)
    assert set(int(v) for v in tr) <= {0, 1}
    assert int(np.sum(tr)) == size // 2


def test_field_multiply_matches_table():
    for m in (3, 5):
        mul = gf2m.mul_table(m)
        for a in range(1 << m):
            for b in range(1 << m):
                assert gf2m.multiply(a, b, m) == mul[a, b]


# generation

def test_single_bit():
    K = generate_kwise(1, 1)
    assert sorted(rows(K)) == [(-1,), (1,)]
    assert verify_kwise(K, 1)[0]


def test_three_pairwise():
    K = generate_kwise(3, 2, m=2)
    assert K.size == 16
    assert verify_kwise(K, 2)[0]
    assert oracles.is_kwise(rows(K), 3, 2)


def test_sixteen_fourwise():
    K = generate_kwise(16, 4, m=4)
    assert K.size == 1 << 16 and K.exact
    assert verify_kwise(K, 4) == (True, None, 0)


@pytest.mark.parametrize("n, k", [(3, 2), (5, 2), (8, 3), (10, 3), (16, 4)])
def test_generated_distributions_equidistributed(n, k):
    K = generate_kwise(n, k)
    assert verify_kwise(K, k)[0]
    assert equidistributed(K, k)
    assert K.size == 1 << (K.m * k)


def test_small_instances_against_oracle():
    for n, k in [(4, 2), (5, 3), (6, 2)]:
        K = generate_kwise(n, k)
        assert oracles.is_kwise(rows(K), n, k)


def test_generation_is_deterministic():
    a = generate_kwise(8, 3, seed=5)
    b = generate_kwise(8, 3, seed=5)
    assert np.array_equal(a.support, b.support)
    assert verify_kwise(generate_kwise(8, 3, seed=9), 3)[0]


def test_support_cap_and_sampling():
    with pytest.raises(CapExceeded):
        generate_kwise(16, 7, cap=1 << 20)
    K = generate_kwise(16, 7, sample=True, samples=1000, cap=1 << 20)
    assert not K.exact and K.size == 1000


def test_k_at_least_n_gives_full_cube():
    K = generate_kwise(4, 6)
    assert K.size == 16 and K.construction == "full-cube"


# verification

def test_verify_full_cube():
    assert verify_kwise(full_cube(5), 5)[0]


def test_verify_diagonal():
    K = KWiseDistribution(2, 1, [0b00, 0b11])
    assert verify_kwise(K, 1)[0]
    ok, violator, bias = verify_kwise(K, 2)
    assert not ok and violator == (1, 2) and bias == 1


@given(st.integers(1, 6), st.lists(st.integers(0, 63), min_size=1, max_size=20), st.integers(1, 3))
def test_verify_agrees_with_pattern_count(n, support, k):
    support = [s % (1 << n) for s in support]
    K = KWiseDistribution(n, k, support)
    k = min(k, n)
    assert verify_kwise(K, k)[0] == oracles.is_kwise(rows(K), n, k) == equidistributed(K, k)


# fooling error

def test_fooling_constant_and_dictator():
    K = generate_kwise(6, 2)
    assert fooling_error(BooleanFn.constant(6, -1), K) == 0
    dictator = BooleanFn.from_callable(6, lambda x: x[0])
    assert fooling_error(dictator, generate_kwise(6, 1)) == 0


def test_fooling_majority_pairwise():
    K = generate_kwise(3, 2)
    h = majority_fn(3)
    k_rows = rows(K)
    expected = abs(Fraction(4, 8) - Fraction(sum(1 for r in k_rows if sum(r) > 0), len(k_rows)))
    assert fooling_error(h, K) == expected


@given(tables(max_n=6))
def test_fooling_full_cube_is_zero(nt):
    n, bits = nt
    assert fooling_error(BooleanFn(n, bits), full_cube(n)) == 0


@given(polys(max_n=6), st.lists(st.integers(0, 63), min_size=1, max_size=30))
def test_fooling_real_mode_matches_cdf_oracle(p, support):
    support = [s % (1 << p.n) for s in support]
    K = KWiseDistribution(p.n, 1, support)
    vals = oracles.values(p)
    assert fooling_error(p, K) == oracles.cdf_gap(vals, [vals[j] for j in support])


def test_fooling_real_mode_thresholds():
    p = MultilinearPoly.linear([1, 1])
    K = KWiseDistribution(2, 1, [0b00, 0b11])
    # values under K are -2 and 2; under U -2, 0, 0, 2
    assert fooling_error((p, [0]), K) == Fraction(1, 4)
    assert fooling_error(p, K, thresholds=[-2]) == Fraction(1, 4)


# sandwich certificates

def test_certificate_exact_representation():
    h = majority_fn(3)
    w = walsh_transform(h)
    pair = SandwichPair(w, w)
    cert = sandwich_certificate(h, pair, generate_kwise(3, 3), Fraction(1, 10))
    assert cert["valid"] and cert["gap"]["value"] == 0 and cert["fooling"]["value"] == 0


def test_certificate_corrupted_upper():
    h = majority_fn(3)
    w = walsh_transform(h)
    bad_u = w - Fraction(3, 8)
    cert = sandwich_certificate(h, SandwichPair(w, bad_u), generate_kwise(3, 3), 1)
    assert not cert["pointwise"]["holds"] and not cert["valid"]
    x = cert["pointwise"]["witness"]
    assert x is not None and len(x) == 3


def test_certificate_degree_too_high():
    h = majority_fn(3)
    w = walsh_transform(h)
    cert = sandwich_certificate(h, SandwichPair(w, w), generate_kwise(3, 2), 1)
    assert not cert["degree_ok"] and not cert["valid"]


def test_certificate_for_three_bit_majority_from_sandwich():
    from ptfkit.sandwich import LinearFormDecomposition, build_threshold_sandwich
    from ptfkit.realpoly import RealPoly

    dec = LinearFormDecomposition(RealPoly(1, {(1,): 1}), [MultilinearPoly.linear([1 / math.sqrt(3)] * 3)])
    pair = build_threshold_sandwich(dec, 0.3)
    h = majority_fn(3)
    K = generate_kwise(3, pair.degree)
    cert = sandwich_certificate(h, pair, K, 0.3)
    assert cert["pointwise"]["holds"] and cert["gap"]["holds"] and cert["fooling"]["holds"]


@given(tables(min_n=2, max_n=5), st.integers(1, 4), st.integers(0, 4))
def test_claim_sandwich_implies_fooling(nt, k, seed):
    """If (a) and (b) pass and K is deg-wise independent, (c) must pass."""
    n, bits = nt
    h = BooleanFn(n, bits)
    k = min(k, n)
    # sandwich from the exact expansion plus/minus a constant slack
    w = walsh_transform(h)
    low_terms = {m: c for m, c in w.items() if bin(m).count("1") <= k}
    approx = MultilinearPoly(n, low_terms)
    slack = max(abs(v - b) for v, b in zip(oracles.values(approx), bits))
    pair = SandwichPair(approx - slack, approx + slack)
    eps = 2 * slack
    K = generate_kwise(n, k, seed=seed)
    cert = sandwich_certificate(h, pair, K, eps)
    assert cert["pointwise"]["holds"] and cert["gap"]["holds"]
    if cert["kwise_verified"]:
        assert cert["fooling"]["holds"]


def test_check_pointwise_float_slack():
    h = BooleanFn(1, [-1, 1])
    p = MultilinearPoly(1, {1: 1.0 + 1e-12})
    ok, witness, worst = check_pointwise(h, p, p)
    assert ok and witness is None and worst < 1e-9
    q = MultilinearPoly(1, {1: 0.9})
    ok, witness, _ = check_pointwise(h, q, q)
    assert not ok and witness is not None


# leafwise fooling

def test_leafwise_depth_zero():
    h = majority_fn(5)
    K = generate_kwise(5, 2)
    out = leafwise_fooling(h, query_tree(5, []), K, Fraction(1, 2), 1)
    assert out["total_error"] == fooling_error(h, K)
    assert out["leaves"][0]["error"] == fooling_error(h, K)


def test_leafwise_depth_one_conditioning():
    h = majority_fn(3)
    K = generate_kwise(3, 3)
    out = leafwise_fooling(h, query_tree(3, [1]), K, 0, 1)
    assert out["k_leaf"] == 2 and out["all_leaves_kwise"]
    assert all(l["mass_matches"] for l in out["leaves"])


def test_leafwise_majority7():
    h = majority_fn(7)
    K = generate_kwise(7, 4)
    tree = random_tree(7, 2, np.random.default_rng(1), stop_prob=0)
    assert tree.depth == 2
    out = leafwise_fooling(h, tree, K, Fraction(1, 4), Fraction(1, 2))
    assert out["all_leaves_kwise"] and out["holds"]
    # leaf masses agree with the uniform measure, so the triangle inequality applies
    assert all(l["mass_matches"] for l in out["leaves"])
    assert out["total_error"] <= out["weighted_error"]


# serialization

def test_distribution_text_round_trip(tmp_path):
    K = generate_kwise(10, 3, seed=2)
    path = tmp_path / "k.txt"
    save_distribution(path, K)
    back = load_distribution(path)
    assert np.array_equal(back.support, K.support)
    assert (back.n, back.k, back.m, back.seed) == (10, 3, K.m, 2)
    assert path.read_text().startswith("# ptfkit-kwise n=10 k=3")


def test_random_polynomial_fooling_by_independence():
    rng = np.random.default_rng(3)
    p = random_poly(8, 2, rng)
    K = generate_kwise(8, 4)
    # degree-2 polynomial: its mean square is a degree-4 statistic, fooled exactly
    vals = oracles.values(p)
    k_vals = [vals[j] for j in K.support]
    assert sum(v * v for v in vals) / len(vals) == sum(v * v for v in k_vals) / len(k_vals)
