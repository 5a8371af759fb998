"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines also
appear in a plain ``pytest -v`` run.
"""

from fractions import Fraction
import math

import numpy as np
import pytest

import oracles
from ptfkit import MultilinearPoly, RealPoly, max_influence, restrict
from ptfkit.concentration import leaf_l2_tail_grid, linear_tail_moment, q_norm, tail_prob_grid
from ptfkit.families import (
    normalized_sum,
    parity_fn,
    random_f2_poly,
    random_fraction_poly,
    random_poly,
    random_unit_linear,
)
from ptfkit.fourier import l2sq, split_variable
from ptfkit.kwise import equidistributed, generate_kwise, sandwich_certificate, verify_kwise
from ptfkit.ptf import aspnes_parity_error, best_ptf_agreement, make_f2_poly, make_mod_m
from ptfkit.regularize import build_tree, greedy_restrict, random_tree, v_alpha
from ptfkit.sandwich import (
    RealFunctionEvaluator,
    build_threshold_sandwich,
    chebyshev_T,
    decomposition_from_spec,
    dubiner_ratio,
    growth_bound_check,
    mollify_sign,
    tensor_chebyshev,
)
from ptfkit.sandwich.chebyshev import ChebyshevPoly


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n[criterion {number:2d}] {status}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def corpus(seed, count, max_n, max_degree, min_n=1):
    """Seeded random integer-coefficient polynomials (checks normalize them)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(1, max_degree + 1))
        n = int(rng.integers(max(d, min_n), max_n + 1))
        out.append(random_poly(n, d, rng, terms=int(rng.integers(1, 7))))
    return out


def test_criterion_01_parity_lower_bound(report):
    got = {n: best_ptf_agreement(parity_fn(n), 1)["agreement"] for n in (2, 3, 4)}
    ok = (got[4] == Fraction(11, 16) == 1 - aspnes_parity_error(4, 1)
          and got[2] == Fraction(3, 4) and got[3] == Fraction(3, 4))
    report(1, "parity best LTF agreement", ok, f"n=4: {got[4]}, n=2: {got[2]}, n=3: {got[3]}")


def test_criterion_02_regularizer_contract(report):
    rng = np.random.default_rng(202)
    failures = []
    for idx in range(200):
        d = int(rng.choice([2, 3]))
        n = int(rng.integers(d + 1, 15))
        delta = Fraction(1, 10) if idx % 2 else Fraction(3, 10)
        p = random_poly(n, d, rng, terms=int(rng.integers(2, 9)))
        rep, out = greedy_restrict(p, delta)
        bound = min(n, math.ceil(math.e * p.degree / float(delta)))
        ok = rep.final_inf <= delta and rep.k <= bound
        ok &= all(s.s_before - s.s_after >= rep.alpha * s.influence for s in rep.steps)
        ok &= out.is_zero() or max_influence(out)[0] <= delta
        if not ok:
            failures.append(idx)
    report(2, "greedy regularizer contract on 200 polynomials", not failures, f"failures: {failures}")


def test_criterion_03_potential_identities(report):
    rng = np.random.default_rng(303)
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        p = random_fraction_poly(n, int(rng.integers(1, min(n, 4) + 1)), rng)
        i = int(rng.integers(1, n + 1))
        a = Fraction(int(rng.integers(0, 13)), int(rng.integers(1, 7)))
        plus, minus = restrict(p, {i: 1}), restrict(p, {i: -1})
        f1, _ = split_variable(p, i)
        bad += (l2sq(plus) + l2sq(minus)) / 2 != l2sq(p)
        bad += (v_alpha(plus, a)[0] + v_alpha(minus, a)[0]) / 2 != v_alpha(p, a)[0] - a * v_alpha(f1, a)[0]
    report(3, "restriction averages of V_0 and V_alpha on 1000 triples", bad == 0, f"mismatches: {bad}")


def test_criterion_04_tree_closure(report):
    rng = np.random.default_rng(404)
    delta, eps = Fraction(3, 10), Fraction(1, 10)
    worst_open, bad_leaves = Fraction(0), 0
    for _ in range(50):
        p = random_poly(14, 2, rng)
        tree = build_tree(p, delta, eps, 14)
        worst_open = max(worst_open, tree.open_mass())
        for leaf in tree.leaves():
            if leaf.status == "closed":
                r = restrict(p, leaf.assignment)
                bad_leaves += not (r.is_zero() or max_influence(r)[0] <= delta)
    ok = worst_open <= eps and bad_leaves == 0
    report(4, "tree closure on 50 degree-2 polynomials", ok,
           f"max open mass {worst_open}, irregular closed leaves {bad_leaves}")


def test_criterion_05_kwise_exactness(report):
    details = []
    ok = True
    for n, k in [(3, 2), (8, 3), (16, 4)]:
        K = generate_kwise(n, k)
        good, violator, bias = verify_kwise(K, k)
        eq = equidistributed(K, k)
        ok &= good and bias == 0 and eq
        details.append(f"({n},{k}) size {K.size}")
    small = generate_kwise(3, 2)
    ok &= oracles.is_kwise([tuple(int(v) for v in r) for r in small.points()], 3, 2)
    report(5, "k-wise independence is exact", ok, ", ".join(details))


def test_criterion_06_tail_bound(report):
    explicit = tail_prob_grid(MultilinearPoly.linear([Fraction(1, 2)] * 4), normalize=False)
    point = [row for row in explicit if Fraction(row["t"]) == 2][0]
    ok = point["prob"] == Fraction(1, 8) and point["bound"] <= 0.5 + 1e-15 and point["holds"]
    violations, checked = 0, 0
    for p in corpus(606, 100, 14, 3):
        for row in tail_prob_grid(p, normalize=True):
            checked += 1
            violations += not row["holds"]
    report(6, "polynomial tail bound", ok and violations == 0,
           f"explicit prob {point['prob']} <= {point['bound']}; {checked} grid points, {violations} violations")


def test_criterion_07_hypercontractivity(report):
    violations = 0
    for p in corpus(606, 100, 14, 3):
        for q in (4, 6):
            violations += not q_norm(p, q)["holds"]
    report(7, "4- and 6-norm hypercontractive bounds on the corpus", violations == 0, f"violations {violations}")


def test_criterion_08_leaf_tail(report):
    rng = np.random.default_rng(808)
    violations, rows = 0, 0
    for _ in range(50):
        n = int(rng.integers(2, 17))
        g = random_unit_linear(n, rng, with_constant=bool(rng.integers(0, 2)))
        tree = random_tree(n, int(rng.integers(1, 7)), rng)
        for row in leaf_l2_tail_grid(g, tree):
            rows += 1
            violations += not row["holds"]
    report(8, "leaf l2 tail bound over 50 (form, tree) pairs", violations == 0,
           f"{rows} grid points, {violations} violations")


@pytest.mark.parametrize("spec, eps", [("sum:9", 0.2), ("maj-product:5", 0.3)])
def test_criterion_09_end_to_end_sandwich(spec, eps, report):
    dec = decomposition_from_spec(spec)
    pair = build_threshold_sandwich(dec, eps)
    h = dec.sign_function()
    K = generate_kwise(h.n, max(pair.degree, 1))
    cert = sandwich_certificate(h, pair, K, eps)
    ok = (cert["pointwise"]["holds"] and cert["gap"]["holds"] and cert["fooling"]["holds"]
          and cert["kwise_verified"] and cert["degree_ok"])
    report(9, f"sandwich certificate for {spec} at eps={eps}", ok,
           f"n={h.n}, degree {pair.degree}, gap {float(cert['gap']['value']):.4f}, "
           f"fooling {float(cert['fooling']['value']):.4f}")


def test_criterion_10_moment_tail(report):
    rows = []
    for n in (4, 9, 16):
        g = normalized_sum(n)
        for c, A in [(1, 2), (1, 4), (2, 4)]:
            rows.append(linear_tail_moment(g, c, A)["holds"])
    report(10, "moment tail bound for normalized sums", all(rows), f"{sum(rows)}/{len(rows)} cases hold")


def test_criterion_11_influence_targets(report):
    mod2 = all(make_mod_m(n, 2).influences() == [1] * n for n in range(1, 13))
    inf3 = make_mod_m(12, 3).influences()
    mod3 = all(abs(float(v) - 2 / 3) <= 0.05 for v in inf3)
    rng = np.random.default_rng(1111)
    f2_violations = 0
    for _ in range(50):
        n = int(rng.integers(2, 11))
        r = int(rng.integers(1, min(3, n) + 1))
        h, _ = make_f2_poly(random_f2_poly(n, r, rng), n)
        f2_violations += any(v < Fraction(2, 2 ** r) for v in h.influences())
    ok = mod2 and mod3 and f2_violations == 0
    report(11, "influence targets", ok,
           f"MOD_3 n=12 Inf = {inf3[0]} ({float(inf3[0]):.4f}); F2 violations {f2_violations}")


def _chebyshev_corpus():
    out = []
    for tau in (0.1, 0.3):
        F = mollify_sign(RealPoly.variable(1, 1), tau=tau)
        for k in (8, 32, 100, 200):
            out.append(tensor_chebyshev(F, 1, k))
    prod = mollify_sign(RealPoly(2, {(1, 1): 1}), tau=0.3)
    for k in (8, 24):
        out.append(tensor_chebyshev(prod, 2, k))
    smooth = [lambda z: np.abs(z).sum(axis=1), lambda z: np.tanh(4 * z.sum(axis=1))]
    for fn in smooth:
        for m, k in [(1, 20), (2, 12), (3, 6)]:
            out.append(tensor_chebyshev(RealFunctionEvaluator(fn, m), m, k))
    return out


def test_criterion_12_chebyshev_growth(report):
    ratios_ok = True
    for k in range(0, 11):
        for w in (1.1, 2.0, 5.0):
            r = dubiner_ratio(k, w)
            ratios_ok &= 0.5 < r <= 1 + 1e-12
            ratios_ok &= abs(float(chebyshev_T(k, w)) - oracles.chebyshev_closed_form(k, w)) <= 1e-9 * max(
                1.0, abs(oracles.chebyshev_closed_form(k, w)))
    # the single T_k polynomials as interpolants
    polys = []
    for k in range(0, 11):
        c = np.zeros(k + 1)
        c[k] = 1.0
        polys.append(ChebyshevPoly(c, 0.0, 1.0))
    polys += _chebyshev_corpus()
    rng = np.random.default_rng(1212)
    checks, failures = 0, 0
    for p in polys:
        for w in (1.1, 2.0, 5.0, 50.0, 1e3):
            for _ in range(3):
                z = rng.uniform(-1, 1, size=p.m)
                z[int(rng.integers(p.m))] = w * rng.choice([-1, 1])
                checks += 1
                failures += not growth_bound_check(p, z)["holds"]
    report(12, "Chebyshev growth ratio and growth checks", ratios_ok and failures == 0,
           f"{checks} growth checks, {failures} failures")
