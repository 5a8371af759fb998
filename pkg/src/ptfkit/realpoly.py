"""Polynomials over R^m in the monomial basis.

These are the "outer" polynomials G(z_1, ..., z_m) that get composed with
linear forms on the cube.  Unlike :class:`ptfkit.fourier.MultilinearPoly`,
exponents are unrestricted (z_1**2 is not reduced).
"""

from collections.abc import Mapping
from fractions import Fraction
import math

import numpy as np

from ptfkit.fourier import normalize_coef


class RealPoly:
    """A polynomial in m real variables, stored as ``{exponent tuple: coef}``."""

    __slots__ = ("m", "_terms", "degree")

    def __init__(self, m, terms=()):
        if m < 1:
            raise ValueError("RealPoly needs at least one variable")
        acc = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, coef in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != m or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for m={m}")
            acc[exps] = acc.get(exps, 0) + normalize_coef(coef)
        self.m = m
        self._terms = {e: c for e, c in acc.items() if c != 0}
        self.degree = max((sum(e) for e in self._terms), default=0)

    @classmethod
    def variable(cls, m, j):
        """The coordinate function z_j (1-based)."""
        exps = [0] * m
        exps[j - 1] = 1
        return cls(m, {tuple(exps): 1})

    @classmethod
    def constant(cls, m, c):
        return cls(m, {(0,) * m: c})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def weight(self):
        """Sum of absolute coefficients, excluding the constant term."""
        return sum((abs(c) for e, c in self._terms.items() if any(e)), 0)

    @property
    def is_multiaffine(self):
        """True when every variable appears with exponent at most one."""
        return all(max(e) <= 1 for e in self._terms)

    def __neg__(self):
        return RealPoly(self.m, {e: -c for e, c in self._terms.items()})

    def __add__(self, other):
        if isinstance(other, RealPoly):
            if other.m != self.m:
                raise ValueError("arity mismatch")
            return RealPoly(self.m, list(self._terms.items()) + list(other._terms.items()))
        return self + RealPoly.constant(self.m, other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RealPoly):
            if other.m != self.m:
                raise ValueError("arity mismatch")
            acc = []
            for e1, c1 in self._terms.items():
                for e2, c2 in other._terms.items():
                    acc.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
            return RealPoly(self.m, acc)
        c = normalize_coef(other)
        return RealPoly(self.m, {e: c * v for e, v in self._terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k):
        out = RealPoly.constant(self.m, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, RealPoly) and self.m == other.m and self._terms == other._terms

    def __hash__(self):
        return hash((self.m, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "RealPoly(0)"
        parts = []
        for e, c in sorted(self._terms.items()):
            mono = "*".join(f"z{j + 1}" + (f"^{k}" if k > 1 else "") for j, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "RealPoly(" + " + ".join(parts) + ")"

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        """Evaluate at one point (length m) or a batch of points (shape ``(N, m)``)."""
        arr = np.asarray(z, dtype=float)
        single = arr.ndim == 1
        pts = arr.reshape(1, -1) if single else arr
        if pts.shape[1] != self.m:
            raise ValueError(f"expected points with {self.m} coordinates")
        out = np.zeros(pts.shape[0])
        for e, c in self._terms.items():
            term = np.full(pts.shape[0], float(c))
            for j, k in enumerate(e):
                if k:
                    term = term * pts[:, j] ** k
            out += term
        return float(out[0]) if single else out

    def evaluate_exact(self, z):
        """Exact evaluation at a single rational point."""
        total = Fraction(0)
        for e, c in self._terms.items():
            term = Fraction(c)
            for zj, k in zip(z, e):
                term *= Fraction(zj) ** k
            total += term
        return total

    def lipschitz_bound(self, radius):
        """``d * C**(d-1) * wt(G)``: an L-infinity Lipschitz bound on ``[-C, C]^m``."""
        d = self.degree
        if d == 0:
            return 0.0
        return d * float(radius) ** (d - 1) * float(self.weight)

    def univariate_coefficients(self):
        """Ascending coefficient list (m == 1 only)."""
        if self.m != 1:
            raise ValueError("only defined for m == 1")
        coefs = [0.0] * (self.degree + 1)
        for (k,), c in self._terms.items():
            coefs[k] = float(c)
        return coefs

    def to_json(self):
        from ptfkit.io import coef_to_json

        return {
            "m": self.m,
            "terms": [{"exp": list(e), "coef": coef_to_json(c)} for e, c in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, data):
        from ptfkit.io import coef_from_json

        return cls(int(data["m"]), [(t["exp"], coef_from_json(t["coef"])) for t in data["terms"]])


def lipschitz_bound(G, radius):
    return G.lipschitz_bound(radius)


def is_finite_real(x):
    return isinstance(x, (int, float, Fraction)) and math.isfinite(float(x))
