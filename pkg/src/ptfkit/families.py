"""Standard polynomials, boolean functions and seeded random instances."""

from fractions import Fraction
from itertools import combinations
import math

import numpy as np

from ptfkit.fourier import BooleanFn, MultilinearPoly, popcounts


def parity_poly(n):
    """``x_1 x_2 ... x_n``."""
    return MultilinearPoly(n, {(1 << n) - 1: 1})


def parity_fn(n):
    return BooleanFn(n, np.where(popcounts(n) % 2 == n % 2, 1, -1), "parity")


def sum_poly(n, scale=1):
    """``scale * (x_1 + ... + x_n)``."""
    return MultilinearPoly.linear([scale] * n)


def normalized_sum(n):
    """``(x_1 + ... + x_n) / sqrt(n)``; exact when n is a perfect square, float otherwise."""
    r = math.isqrt(n)
    if r * r == n:
        return sum_poly(n, Fraction(1, r))
    return sum_poly(n, 1 / math.sqrt(n))


def majority3_poly():
    """``(x1 + x2 + x3 - x1 x2 x3) / 2``, the Fourier expansion of majority on 3 bits."""
    return MultilinearPoly.from_monomials(3, [((1,), Fraction(1, 2)), ((2,), Fraction(1, 2)),
                                              ((3,), Fraction(1, 2)), ((1, 2, 3), Fraction(-1, 2))])


def majority_fn(n):
    """Majority of n bits (n odd)."""
    if n % 2 == 0:
        raise ValueError("majority needs an odd number of bits")
    return BooleanFn(n, np.where(2 * popcounts(n) > n, 1, -1), "majority")


def and_fn(n):
    """+1 only at the all-ones point."""
    table = -np.ones(1 << n, dtype=np.int8)
    table[-1] = 1
    return BooleanFn(n, table, "and")


def random_poly(n, d, rng, terms=None, coef_range=5, exact_degree=True):
    """Random polynomial with integer coefficients in ``[-coef_range, coef_range] \\ {0}``.

    ``terms`` monomials of size <= d are drawn (default ``2n``); when
    ``exact_degree`` one monomial of size exactly d is forced in.
    """
    rng = np.random.default_rng(rng)
    terms = 2 * n if terms is None else terms
    acc = {}
    if exact_degree and d > 0:
        acc[_random_mask(n, d, rng)] = _nonzero(rng, coef_range)
    for _ in range(terms):
        size = int(rng.integers(0, d + 1))
        acc[_random_mask(n, size, rng)] = _nonzero(rng, coef_range)
    return MultilinearPoly(n, acc)


def random_fraction_poly(n, d, rng, terms=None, den=4):
    """Random polynomial with small Fraction coefficients."""
    rng = np.random.default_rng(rng)
    p = random_poly(n, d, rng, terms)
    return MultilinearPoly(n, {m: Fraction(int(c), int(rng.integers(1, den + 1))) for m, c in p.items()})


def _nonzero(rng, r):
    v = int(rng.integers(1, r + 1))
    return v if rng.random() < 0.5 else -v


def _random_mask(n, size, rng):
    chosen = rng.choice(n, size=size, replace=False) if size else []
    return sum(1 << int(i) for i in chosen)


def random_linear(n, rng, coef_range=5):
    rng = np.random.default_rng(rng)
    return MultilinearPoly.linear([_nonzero(rng, coef_range) for _ in range(n)])


def random_unit_linear(n, rng, with_constant=False, coef_range=6):
    """Random linear form with ``E[g^2] = 1`` exactly.

    Integer coefficients are redrawn until their square sum is a perfect
    square r^2, then divided by r.
    """
    rng = np.random.default_rng(rng)
    while True:
        coefs = [_nonzero(rng, coef_range) for _ in range(n + int(with_constant))]
        s = sum(c * c for c in coefs)
        r = math.isqrt(s)
        if r * r == s:
            scaled = [Fraction(c, r) for c in coefs]
            if with_constant:
                return MultilinearPoly.linear(scaled[1:], scaled[0])
            return MultilinearPoly.linear(scaled)


def random_f2_poly(n, r, rng, max_terms=None):
    """Random GF(2) polynomial of degree <= r depending on every variable.

    Returned as a sorted list of monomials (tuples of 1-based variables).
    """
    rng = np.random.default_rng(rng)
    max_terms = max_terms or 2 * n
    terms = set()
    for _ in range(int(rng.integers(1, max_terms + 1))):
        size = int(rng.integers(1, r + 1))
        terms ^= {tuple(sorted(int(i) + 1 for i in rng.choice(n, size=size, replace=False)))}
    covered = {v for mono in terms for v in mono}
    # variables left out get a degree-1 monomial
    terms |= {(v,) for v in range(1, n + 1) if v not in covered}
    return sorted(terms)


def all_monomial_masks(n, d):
    """Masks of all monomials of size <= d, by size then value."""
    out = []
    for size in range(min(d, n) + 1):
        for combo in combinations(range(n), size):
            out.append(sum(1 << i for i in combo))
    return out


def _parts(spec):
    name, _, rest = spec.partition(":")
    return name.strip().lower(), [a for a in rest.split(":") if a != ""] if rest else []


def poly_from_spec(spec, seed=0):
    """Polynomial from a short spec string.

    Forms: ``parity:n``, ``sum:n[:scale]``, ``normsum:n``, ``maj3``,
    ``linear:c1,c2,...[:const]``, ``random:n:d[:seed]``.
    """
    from ptfkit.fourier import to_rational

    name, args = _parts(spec)
    if name == "parity":
        return parity_poly(int(args[0]))
    if name == "sum":
        return sum_poly(int(args[0]), to_rational(Fraction(args[1])) if len(args) > 1 else 1)
    if name == "normsum":
        return normalized_sum(int(args[0]))
    if name == "maj3":
        return majority3_poly()
    if name == "linear":
        coefs = [Fraction(c) for c in args[0].split(",")]
        const = Fraction(args[1]) if len(args) > 1 else 0
        return MultilinearPoly.linear(coefs, const)
    if name == "random":
        n, d = int(args[0]), int(args[1])
        return random_poly(n, d, int(args[2]) if len(args) > 2 else seed)
    raise ValueError(f"unknown polynomial spec {spec!r}")


def fn_from_spec(spec, seed=0):
    """Boolean function from a short spec string.

    Forms: ``parity:n``, ``majority:n``, ``and:n``, ``mod:n:m``,
    ``hex:n:HEX``, ``sign:<polynomial spec>``.
    """
    name, args = _parts(spec)
    if name == "parity":
        return parity_fn(int(args[0]))
    if name == "majority":
        return majority_fn(int(args[0]))
    if name == "and":
        return and_fn(int(args[0]))
    if name == "mod":
        from ptfkit.ptf import make_mod_m

        return make_mod_m(int(args[0]), int(args[1]))
    if name == "hex":
        return BooleanFn.from_hex(int(args[0]), args[1])
    if name == "sign":
        return BooleanFn.sign_of(poly_from_spec(spec.partition(":")[2], seed))
    raise ValueError(f"unknown boolean function spec {spec!r}")
