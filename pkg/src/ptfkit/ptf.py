"""PTF membership, best low-degree approximation, and hard target functions."""

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations, product
import math

import numpy as np

from ptfkit.errors import CapExceeded, PreconditionError, check_cap
from ptfkit.families import all_monomial_masks
from ptfkit.fourier import (
    BooleanFn,
    MultilinearPoly,
    cube_values_exact,
    popcounts,
    to_rational,
    walsh_transform,
)
from ptfkit.regularize import build_tree
from ptfkit.simplex import find_feasible

IS_PTF_MAX_N = 6
BEST_APPROX_MAX_N = 4

_cache = {}


def _character_matrix(n, masks):
    """``chi_S(x_j)`` for every point j and monomial S (int array, shape (2^n, len(masks)))."""
    j = np.arange(1 << n, dtype=np.int64)[:, None]
    S = np.array(masks, dtype=np.int64)[None, :]
    inter = S & j
    cnt = np.zeros(inter.shape, dtype=np.int64)
    sizes = np.array([m.bit_count() for m in masks], dtype=np.int64)[None, :]
    for i in range(n):
        cnt += (inter >> i) & 1
    # x_i = +1 for set bits, so chi_S = (-1)^{|S| - |S & j|}
    return 1 - 2 * ((sizes - cnt) & 1)


def _min_margin(h, poly):
    num, den = cube_values_exact(poly)
    margins = np.asarray(num).astype(object) * h.table.astype(np.int64)
    return Fraction(int(min(margins)), den)


def is_ptf(h, d, use_cache=True):
    """Decide whether ``h = sgn(f)`` for some polynomial f of degree <= d.

    Solves the exact LP ``h(x) f(x) >= 1`` over the coefficients of f.
    Returns ``{"feasible", "witness", "margin"}``; the witness is checked
    point by point.
    """
    if h.n > IS_PTF_MAX_N:
        raise CapExceeded(f"is_ptf supports n <= {IS_PTF_MAX_N}")
    key = (h.n, h.table.tobytes(), d)
    if use_cache and key in _cache:
        return _cache[key]
    if d >= h.n:
        witness = walsh_transform(h)
    else:
        masks = all_monomial_masks(h.n, d)
        chi = _character_matrix(h.n, masks)
        rows = (chi * h.table.astype(np.int64)[:, None]).tolist()
        x = find_feasible(rows, [1] * len(rows))
        witness = None if x is None else MultilinearPoly(h.n, dict(zip(masks, x)))
    if witness is None:
        result = {"feasible": False, "witness": None, "margin": None}
    else:
        margin = _min_margin(h, witness)
        if margin < 1:
            raise ArithmeticError("LP witness failed exact verification")
        result = {"feasible": True, "witness": witness, "margin": margin}
    if use_cache:
        _cache[key] = result
    return result


def clear_cache():
    _cache.clear()


def _feasible_flip(args):
    n, table_bytes, d, flips = args
    table = np.frombuffer(table_bytes, dtype=np.int8).copy()
    table[list(flips)] *= -1
    return is_ptf(BooleanFn(n, table), d)["feasible"]


def best_ptf_agreement(g, d, jobs=1):
    """Largest exact agreement ``Pr[h = g]`` over degree-d PTFs h.

    Candidate tables are scanned by increasing Hamming distance from g (and
    lexicographically within a distance), so the first PTF found is optimal.
    """
    if g.n > BEST_APPROX_MAX_N:
        raise CapExceeded(f"best_ptf_agreement supports n <= {BEST_APPROX_MAX_N}")
    size = 1 << g.n
    base = g.table.tobytes()
    for dist in range(size + 1):
        combos = list(combinations(range(size), dist))
        if jobs > 1 and len(combos) > 64:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                found = list(ex.map(_feasible_flip, [(g.n, base, d, c) for c in combos], chunksize=64))
            hit = next((c for c, ok in zip(combos, found) if ok), None)
        else:
            hit = next((c for c in combos if _feasible_flip((g.n, base, d, c))), None)
        if hit is not None:
            table = g.table.copy()
            table[list(hit)] *= -1
            h = BooleanFn(g.n, table, "ptf")
            return {
                "agreement": Fraction(size - dist, size),
                "h": h,
                "witness": is_ptf(h, d)["witness"],
                "distance": dist,
            }
    raise AssertionError("unreachable: degree-n PTFs represent every table")


def best_ltf_agreement_by_weights(g, max_weight=3):
    """Heuristic best agreement over LTFs with integer weights in ``[-W, W]``.

    Enumerates ``sgn(w_0 + sum w_i x_i)`` (sgn(0) = +1) for all integer
    weight vectors.  Every candidate is a genuine LTF, so the result is a
    lower bound on the true optimum; it is exact only when W is large
    enough for the optimal LTF.
    """
    n = g.n
    check_cap(n, 8)
    pts = 2 * ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1) - 1
    best = None
    rng_w = range(-max_weight, max_weight + 1)
    target = g.table.astype(np.int64)
    for w in product(rng_w, repeat=n):
        base = pts @ np.array(w)
        for w0 in range(-n * max_weight, n * max_weight + 1):
            table = np.where(base + w0 >= 0, 1, -1)
            agree = int(np.count_nonzero(table == target))
            if best is None or agree > best[0]:
                best = (agree, (w0,) + tuple(w))
    return {"agreement": Fraction(best[0], 1 << n), "weights": best[1], "heuristic": True}


def aspnes_parity_error(n, k):
    """``sum_{i=0}^{floor((n-k-1)/2)} C(n, i) / 2^n``."""
    top = (n - k - 1) // 2
    return Fraction(sum(math.comb(n, i) for i in range(top + 1)) if top >= 0 else 0, 1 << n)


def make_mod_m(n, m):
    """+1 exactly when the number of +1 coordinates is divisible by m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    check_cap(n)
    return BooleanFn(n, np.where(popcounts(n) % m == 0, 1, -1), f"MOD_{m}")


def _reduce_f2(monomials, n):
    terms = set()
    for mono in monomials:
        vs = frozenset(int(v) for v in mono)
        if any(v < 1 or v > n for v in vs):
            raise ValueError(f"monomial {tuple(mono)} uses a variable outside 1..{n}")
        terms ^= {vs}
    return terms


def make_f2_poly(monomials, n, variables=None):
    """``h(x) = (-1)^{q(x')}`` where ``x_i = (-1)^{x'_i}`` and q is a GF(2) polynomial.

    ``monomials`` lists variable tuples (the empty tuple is the constant 1).
    The report checks ``Inf_i(h) >= 2^{1-r}`` for every declared variable.
    """
    check_cap(n)
    terms = _reduce_f2(monomials, n)
    r = max((len(t) for t in terms), default=0)
    j = np.arange(1 << n, dtype=np.int64)
    value = np.zeros(1 << n, dtype=np.int64)
    for t in terms:
        # x'_i = 1 exactly when x_i = -1, i.e. bit i-1 of j is clear
        on = np.ones(1 << n, dtype=np.int64)
        for v in t:
            on &= 1 - ((j >> (v - 1)) & 1)
        value ^= on
    h = BooleanFn(n, 1 - 2 * value, "F2-poly")
    variables = list(range(1, n + 1)) if variables is None else list(variables)
    present = {v for t in terms for v in t}
    missing = [v for v in variables if v not in present]
    if missing:
        raise PreconditionError(f"polynomial does not depend on variables {missing}")
    bound = Fraction(2) ** (1 - r) if r >= 1 else Fraction(0)
    infs = {v: h.influence(v) for v in variables}
    return h, {
        "degree": r,
        "bound": bound,
        "influences": infs,
        "holds": all(v >= bound for v in infs.values()),
    }


def _free_position(assignment, n, var):
    free = assignment.free_variables(n)
    return free.index(var) + 1 if var in free else None


def lower_bound_audit(g, h_poly, delta, eps, depth_budget, tau=None, allow_zeros=True):
    """Replay the disagreement lower bound for ``h = sgn(h_poly)`` against g.

    Builds the regularizing tree of ``h_poly``, picks the influential
    variable of g assigned on the fewest paths, and evaluates exactly:

    ``tau <= Inf_i(g) <= sum_{leaves not fixing i} mu(l) Inf_i(g|l) + p_i
    <= 2q + E_l[Inf_i(h|l)] + p_i <= 2q + delta' + eps_open + p_i
    <= 2q + delta' + eps_open + m/n'``

    and the implied bound ``q >= (tau - eps_open - delta' - m/n') / 2``.
    """
    n = g.n
    if h_poly.n != n:
        raise ValueError("g and h_poly must have the same n")
    h = BooleanFn.sign_of(h_poly, allow_zeros=allow_zeros)
    infs = g.influences()
    if tau is None:
        positive = [v for v in infs if v > 0]
        if not positive:
            raise PreconditionError("g has no influential variable")
        tau = min(positive)
    tau = to_rational(tau)
    influential = [i + 1 for i, v in enumerate(infs) if v >= tau]
    if not influential:
        raise PreconditionError(f"no variable of g has influence >= {tau}")
    n_prime = len(influential)
    tree = build_tree(h_poly, delta, eps, depth_budget)
    leaves = tree.leaves()
    m = tree.depth
    assign_prob = {i: sum((l.measure for l in leaves if i in l.assignment), Fraction(0)) for i in influential}
    i_star = min(influential, key=lambda i: (assign_prob[i], i))
    p_i = assign_prob[i_star]
    q = 1 - g.agreement(h)

    g_term = Fraction(0)
    h_term = Fraction(0)
    delta_prime = Fraction(0)
    for leaf in leaves:
        h_leaf = h.restrict(leaf.assignment)
        if leaf.status == "closed" and h_leaf.n:
            delta_prime = max(delta_prime, max(h_leaf.influences()))
        pos = _free_position(leaf.assignment, n, i_star)
        if pos is None:
            continue
        g_term += leaf.measure * g.restrict(leaf.assignment).influence(pos)
        h_term += leaf.measure * h_leaf.influence(pos)
    eps_open = tree.open_mass()
    chain = [
        ("tau", tau),
        ("inf_g", infs[i_star - 1]),
        ("leaf_average", g_term + p_i),
        ("triangle", 2 * q + h_term + p_i),
        ("regular_leaves", 2 * q + delta_prime + eps_open + p_i),
        ("averaging", 2 * q + delta_prime + eps_open + Fraction(m, n_prime)),
    ]
    chain_ok = all(a[1] <= b[1] for a, b in zip(chain, chain[1:]))
    bound = (tau - eps_open - delta_prime - Fraction(m, n_prime)) / 2
    return {
        "q": q,
        "tau": tau,
        "variable": i_star,
        "n_prime": n_prime,
        "m": m,
        "p_i": p_i,
        "delta": to_rational(delta),
        "eps": to_rational(eps),
        "eps_open": eps_open,
        "delta_prime": delta_prime,
        "h_leaf_influence": h_term,
        "chain": chain,
        "chain_holds": chain_ok,
        "bound": bound,
        "holds": bool(chain_ok and q >= bound),
        "vacuous": bound <= 0,
        "tree_leaves": len(leaves),
    }


__all__ = [
    "aspnes_parity_error",
    "best_ltf_agreement_by_weights",
    "best_ptf_agreement",
    "is_ptf",
    "lower_bound_audit",
    "make_f2_poly",
    "make_mod_m",
]
