"""Arithmetic in GF(2^m) for m <= 8, elements encoded as ints below 2^m."""

from functools import lru_cache

import numpy as np

# Irreducible polynomials, given by their nonzero exponents (standard table).
IRREDUCIBLE = {
    1: (1, 0),
    2: (2, 1, 0),
    3: (3, 1, 0),
    4: (4, 1, 0),
    5: (5, 2, 0),
    6: (6, 4, 3, 1, 0),
    7: (7, 1, 0),
    8: (8, 4, 3, 2, 0),
}


def modulus(m):
    if m not in IRREDUCIBLE:
        raise ValueError(f"GF(2^{m}) is not supported (1 <= m <= 8)")
    return sum(1 << e for e in IRREDUCIBLE[m])


def multiply(a, b, m):
    """Carry-less product reduced modulo the field polynomial."""
    mod = modulus(m)
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= mod
    return out


def power(a, e, m):
    out = 1
    for _ in range(e):
        out = multiply(out, a, m)
    return out


def trace(a, m):
    """Absolute trace ``a + a^2 + ... + a^(2^(m-1))``, which lies in {0, 1}."""
    total, x = 0, a
    for _ in range(m):
        total ^= x
        x = multiply(x, x, m)
    if total not in (0, 1):
        raise ArithmeticError("trace left GF(2); field polynomial is not irreducible")
    return total


@lru_cache(maxsize=None)
def mul_table(m):
    size = 1 << m
    table = np.array([[multiply(a, b, m) for b in range(size)] for a in range(size)], dtype=np.int64)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def trace_table(m):
    table = np.array([trace(a, m) for a in range(1 << m)], dtype=np.int64)
    table.flags.writeable = False
    return table
