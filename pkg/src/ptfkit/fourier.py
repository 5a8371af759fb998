"""Exact multilinear polynomials and boolean functions on the cube {-1,1}^n.

Conventions used throughout the package:

* Variables are 1-based in every public signature; internally a monomial is
  a bitmask with bit ``i - 1`` standing for ``x_i``.
* Cube points are indexed by integers ``j`` in ``[0, 2**n)`` where bit
  ``i - 1`` of ``j`` is set exactly when ``x_i = +1``.  Index 0 is the point
  (-1, ..., -1).
* Coefficients are ``int`` or ``Fraction``; floats are tolerated so that the
  sandwich pipeline can reuse the same container.
"""

from collections.abc import Mapping
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np

from ptfkit.errors import (
    CapExceeded,
    DimensionError,
    PreconditionError,
    ZeroPolynomialError,
    check_cap,
)


def normalize_coef(c):
    """Coerce a coefficient to int, Fraction or float (integral Fractions become int)."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, float):
        return c
    if isinstance(c, np.integer):
        return int(c)
    if isinstance(c, np.floating):
        return float(c)
    if isinstance(c, str):
        return normalize_coef(Fraction(c))
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def is_exact(c):
    return not isinstance(c, float)


def to_rational(x):
    """Exact value of a user-supplied number; floats are read by their decimal repr."""
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"{x} is not finite")
        return normalize_coef(Fraction(repr(x)))
    return normalize_coef(Fraction(x) if isinstance(x, str) else x)


def mask_from_vars(variables, n=None):
    """Bitmask of a collection of 1-based variables (repeats cancel, as x_i^2 = 1)."""
    mask = 0
    for v in variables:
        v = int(v)
        if v < 1 or (n is not None and v > n):
            raise DimensionError(f"variable {v} out of range 1..{n}")
        mask ^= 1 << (v - 1)
    return mask


def vars_from_mask(mask):
    """Sorted 1-based variables in a bitmask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def point_from_index(j, n):
    """The cube point with index ``j`` as a tuple of +-1."""
    return tuple(1 if (j >> i) & 1 else -1 for i in range(n))


def index_from_point(x):
    j = 0
    for i, xi in enumerate(x):
        if xi == 1:
            j |= 1 << i
        elif xi != -1:
            raise DimensionError(f"coordinate {xi} is not +-1")
    return j


def cube_points(n):
    """All 2**n points as an int8 array of shape (2**n, n), in index order."""
    check_cap(n)
    j = np.arange(1 << n, dtype=np.int64)
    bits = (j[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


@lru_cache(maxsize=32)
def _popcount_table(n):
    j = np.arange(1 << n, dtype=np.int64)
    count = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        count += (j >> i) & 1
    count.flags.writeable = False
    return count


def popcounts(n):
    """Popcount of every index in ``[0, 2**n)``."""
    return _popcount_table(n)


def _subset_signs(n):
    """(-1)^{|S|} for every mask S, as int64."""
    return 1 - 2 * (popcounts(n) & 1)


def fwht(a):
    """Unnormalized Walsh-Hadamard transform along axis 0 (returns a new array).

    ``out[S] = sum_j (-1)^{|S & j|} a[j]``.  Works for int64, float and object
    arrays.
    """
    out = np.array(a, copy=True)
    size = out.shape[0]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        view = out.reshape((size // (2 * h), 2, h) + out.shape[1:])
        left = view[:, 0].copy()
        right = view[:, 1]
        view[:, 0] = left + right
        view[:, 1] = left - right
        h *= 2
    return out


class MultilinearPoly:
    """Multilinear polynomial ``sum_I c_I prod_{i in I} x_i`` in canonical form.

    ``terms`` maps bitmasks to nonzero coefficients; equality is structural.
    The degree of the zero polynomial is reported as 0.
    """

    __slots__ = ("n", "_terms", "degree")

    def __init__(self, n, terms=()):
        if n < 0:
            raise DimensionError("n must be nonnegative")
        acc = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mask, coef in items:
            mask = int(mask)
            if mask < 0 or mask >> n:
                raise DimensionError(f"monomial {mask:#x} uses variables beyond n={n}")
            acc[mask] = acc.get(mask, 0) + normalize_coef(coef)
        self.n = n
        self._terms = {m: normalize_coef(c) for m, c in acc.items() if c != 0}
        self.degree = max((m.bit_count() for m in self._terms), default=0)

    # construction helpers
    @classmethod
    def constant(cls, n, c):
        return cls(n, {0: c})

    @classmethod
    def variable(cls, n, i):
        return cls(n, {mask_from_vars([i], n): 1})

    @classmethod
    def from_monomials(cls, n, monomials):
        """Build from ``[(vars, coef), ...]`` with 1-based variable lists."""
        return cls(n, [(mask_from_vars(v, n), c) for v, c in monomials])

    @classmethod
    def linear(cls, coefs, const=0):
        """``const + sum_i coefs[i-1] * x_i``."""
        n = len(coefs)
        terms = [(0, const)] + [(1 << i, c) for i, c in enumerate(coefs)]
        return cls(n, terms)

    @classmethod
    def from_cube_values(cls, values, n=None):
        """Interpolate the unique multilinear polynomial through cube values.

        Integer or Fraction inputs give exact coefficients; float inputs give
        float coefficients.
        """
        values = list(values) if not isinstance(values, np.ndarray) else values
        size = len(values)
        if n is None:
            n = size.bit_length() - 1
        if size != 1 << n:
            raise DimensionError(f"expected {1 << n} values, got {size}")
        arr = np.asarray(values)
        signs = _subset_signs(n)
        if arr.dtype.kind == "f":
            coefs = fwht(arr.astype(float)) * signs / float(1 << n)
            return cls(n, {int(s): float(c) for s, c in enumerate(coefs) if c != 0.0})
        if arr.dtype.kind in "iub":
            arr = arr.astype(np.int64)
            if np.abs(arr).max(initial=0) * (1 << n) < (1 << 62):
                raw = fwht(arr) * signs
            else:
                raw = fwht(arr.astype(object)) * signs
            den = 1 << n
            return cls(n, {int(s): Fraction(int(c), den) for s, c in enumerate(raw) if c != 0})
        fr = [Fraction(v) for v in values]
        den = math.lcm(*[f.denominator for f in fr]) if fr else 1
        ints = np.array([int(f * den) for f in fr], dtype=object)
        raw = fwht(ints) * signs
        total = den << n
        return cls(n, {int(s): Fraction(int(c), total) for s, c in enumerate(raw) if c != 0})

    # container protocol
    @property
    def terms(self):
        """A copy of the ``{mask: coef}`` map."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, variables=()):
        """Coefficient of the monomial on the given 1-based variables."""
        return self._terms.get(mask_from_vars(variables, self.n), 0)

    def monomials(self):
        """Sorted ``(vars tuple, coef)`` pairs."""
        return sorted(((vars_from_mask(m), c) for m, c in self._terms.items()),
                      key=lambda t: (len(t[0]), t[0]))

    def is_zero(self):
        return not self._terms

    @property
    def exact(self):
        return all(is_exact(c) for c in self._terms.values())

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, MultilinearPoly):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction, float)):
            return self._terms == ({0: normalize_coef(other)} if other != 0 else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"MultilinearPoly(n={self.n}, 0)"
        parts = []
        for vs, c in self.monomials():
            mono = "*".join(f"x{v}" for v in vs)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"MultilinearPoly(n={self.n}, " + " + ".join(parts) + ")"

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, MultilinearPoly):
            if other.n != self.n:
                raise DimensionError(f"arity mismatch {self.n} vs {other.n}")
            return other
        return MultilinearPoly.constant(self.n, other)

    def __neg__(self):
        return MultilinearPoly(self.n, {m: -c for m, c in self._terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        return MultilinearPoly(self.n, list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultilinearPoly):
            c = normalize_coef(other)
            return MultilinearPoly(self.n, {m: c * v for m, v in self._terms.items()})
        other = self._coerce(other)
        acc = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 ^ m2
                acc[m] = acc.get(m, 0) + c1 * c2
        return MultilinearPoly(self.n, acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = normalize_coef(other)
        if is_exact(c):
            c = Fraction(c)
        return MultilinearPoly(self.n, {m: v / c for m, v in self._terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = MultilinearPoly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def to_float(self):
        return MultilinearPoly(self.n, {m: float(c) for m, c in self._terms.items()})

    def chop(self, tol):
        """Drop float coefficients with ``|c| <= tol``."""
        return MultilinearPoly(self.n, {m: c for m, c in self._terms.items() if abs(c) > tol})

    def embed(self, n):
        """The same polynomial viewed over ``n >= self.n`` variables."""
        if n < self.n:
            raise DimensionError("cannot embed into fewer variables")
        return MultilinearPoly(n, self._terms)

    # evaluation
    def __call__(self, x):
        return evaluate(self, x)

    def cube_values(self):
        return cube_values(self)

    def to_json(self):
        from ptfkit.io import poly_to_json

        return poly_to_json(self)


def evaluate(p, x):
    """Exact value of ``p`` at the point ``x`` (a sequence of n entries, each +-1)."""
    if len(x) != p.n:
        raise DimensionError(f"point has {len(x)} coordinates, polynomial has n={p.n}")
    neg = 0
    for i, xi in enumerate(x):
        if xi == -1:
            neg |= 1 << i
        elif xi != 1:
            raise DimensionError(f"coordinate {xi} is not +-1")
    total = 0
    for m, c in p.items():
        total += -c if (m & neg).bit_count() & 1 else c
    return normalize_coef(total) if not isinstance(total, float) else total


eval_poly = evaluate


def cube_values_exact(p):
    """Values at every cube point as ``(numerators, denominator)``.

    The numerator array is int64 when that cannot overflow and an object
    array of Python ints otherwise.  ``value[j] = numerators[j] / denominator``.
    """
    check_cap(p.n)
    if not p.exact:
        raise PreconditionError("exact cube values need rational coefficients")
    den = math.lcm(*[Fraction(c).denominator for c in p._terms.values()]) if p._terms else 1
    ints = {m: int(Fraction(c) * den) for m, c in p.items()}
    size = 1 << p.n
    signs = _subset_signs(p.n)
    if sum(abs(v) for v in ints.values()) < (1 << 62):
        dense = np.zeros(size, dtype=np.int64)
    else:
        dense = np.zeros(size, dtype=object)
        dense[:] = 0
    for m, v in ints.items():
        dense[m] = v
    return fwht(dense * signs), den


def cube_values(p):
    """Float values at every cube point (index order described in the module docstring)."""
    check_cap(p.n)
    size = 1 << p.n
    dense = np.zeros(size, dtype=float)
    for m, c in p.items():
        dense[m] = float(c)
    return fwht(dense * _subset_signs(p.n))


def cube_values_fraction(p):
    """Exact values at every cube point as a list of Fractions (or ints)."""
    num, den = cube_values_exact(p)
    return [normalize_coef(Fraction(int(v), den)) for v in num]


# statistics

def mean(p):
    return p._terms.get(0, 0)


def l2sq(p):
    """``sum_I c_I^2``, which equals ``E[p(x)^2]`` over the uniform cube."""
    return normalize_coef(sum((c * c for c in p._terms.values()), 0))


def variance(p):
    return normalize_coef(sum((c * c for m, c in p._terms.items() if m), 0))


def weight(p):
    """Sum of absolute coefficients excluding the constant term."""
    return normalize_coef(sum((abs(c) for m, c in p._terms.items() if m), 0))


def stats(p):
    return {
        "mean": mean(p),
        "l2sq": l2sq(p),
        "variance": variance(p),
        "weight": weight(p),
        "degree": p.degree,
    }


def _ratio(num, den):
    if isinstance(num, float) or isinstance(den, float):
        return num / den
    return normalize_coef(Fraction(num, 1) / den)


def _check_var(i, n):
    if not 1 <= i <= n:
        raise DimensionError(f"variable {i} out of range 1..{n}")


def influence_weights(p):
    """Unnormalized influences ``sum_{I contains i} c_I^2`` for i = 1..n."""
    out = [0] * p.n
    for m, c in p._terms.items():
        sq = c * c
        while m:
            low = m & -m
            out[low.bit_length() - 1] += sq
            m ^= low
    return [normalize_coef(v) for v in out]


def _influence_denominator(p, normalization):
    if normalization == "l2":
        den = l2sq(p)
    elif normalization == "variance":
        den = variance(p)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    if den == 0:
        raise ZeroPolynomialError(f"influence undefined: {normalization} of the polynomial is 0")
    return den


def influence_real(p, i, normalization="l2"):
    """Normalized Fourier weight on monomials containing ``x_i``.

    ``normalization="l2"`` divides by ``E[f^2]`` (constant term included), the
    normalization used by the greedy regularizer; ``"variance"`` divides by
    ``Var f`` instead, the convention of anti-concentration statements.
    """
    _check_var(i, p.n)
    den = _influence_denominator(p, normalization)
    bit = 1 << (i - 1)
    num = normalize_coef(sum((c * c for m, c in p._terms.items() if m & bit), 0))
    return _ratio(num, den)


def influences_real(p, normalization="l2"):
    den = _influence_denominator(p, normalization)
    return [_ratio(w, den) for w in influence_weights(p)]


def _argmax(values):
    best_i, best = 0, None
    for i, v in enumerate(values):
        if best is None or v > best:
            best_i, best = i, v
    return best, best_i + 1


def max_influence(obj, normalization="l2"):
    """``(Inf_max, argmax variable)`` with ties broken toward the smaller index.

    Accepts a :class:`MultilinearPoly` (real influences) or a
    :class:`BooleanFn`.  A nonzero constant polynomial has every influence 0
    and reports variable 1 (or variable 0 when n = 0).
    """
    if isinstance(obj, BooleanFn):
        infs = obj.influences()
    else:
        infs = influences_real(obj, normalization)
    if not infs:
        return 0, 0
    return _argmax(infs)


def restrict(p, assignment, compress=True):
    """Substitute the bound variables of ``assignment`` into ``p``.

    With ``compress=True`` the free variables are renumbered 1..n-b in their
    original order; otherwise the output keeps arity n and the bound
    variables simply no longer occur.
    """
    a = assignment if isinstance(assignment, PartialAssignment) else PartialAssignment(assignment)
    a.check(p.n)
    bound, neg = a.mask, a.negmask
    free = [i for i in range(p.n) if not (bound >> i) & 1]
    acc = {}
    for m, c in p._terms.items():
        if (m & neg).bit_count() & 1:
            c = -c
        rest = m & ~bound
        if compress:
            rest = _compress_mask(rest, free)
        acc[rest] = acc.get(rest, 0) + c
    return MultilinearPoly(len(free) if compress else p.n, acc)


def _compress_mask(mask, free):
    out = 0
    for pos, i in enumerate(free):
        if (mask >> i) & 1:
            out |= 1 << pos
    return out


def split_variable(p, i):
    """Write ``p = x_i * f1 + f2`` and return ``(f1, f2)`` (both over n variables)."""
    _check_var(i, p.n)
    bit = 1 << (i - 1)
    f1 = {m ^ bit: c for m, c in p._terms.items() if m & bit}
    f2 = {m: c for m, c in p._terms.items() if not m & bit}
    return MultilinearPoly(p.n, f1), MultilinearPoly(p.n, f2)


def compose_linear(G, forms):
    """Multilinear reduction of ``G(g_1(x), ..., g_m(x))``.

    ``G`` is a :class:`ptfkit.realpoly.RealPoly` (or a MultilinearPoly read as
    a polynomial over m reals); ``forms`` are degree-<=1 MultilinearPolys on a
    common n.
    """
    from ptfkit.realpoly import RealPoly

    if isinstance(G, MultilinearPoly):
        G = RealPoly(G.n, [(tuple((m >> j) & 1 for j in range(G.n)), c) for m, c in G.items()])
    if len(forms) != G.m:
        raise DimensionError(f"G has {G.m} variables but {len(forms)} forms were given")
    if not forms:
        raise DimensionError("need at least one form")
    n = forms[0].n
    for g in forms:
        if g.n != n:
            raise DimensionError("forms must share the same n")
        if g.degree > 1:
            raise PreconditionError("compose_linear needs forms of degree <= 1")
    powers = [[MultilinearPoly.constant(n, 1)] for _ in forms]

    def power(j, e):
        cache = powers[j]
        while len(cache) <= e:
            cache.append(cache[-1] * forms[j])
        return cache[e]

    total = MultilinearPoly(n)
    for exps, c in G.items():
        term = MultilinearPoly.constant(n, c)
        for j, e in enumerate(exps):
            if e:
                term = term * power(j, e)
        total = total + term
    return total


class PartialAssignment(Mapping):
    """Immutable map from 1-based variables to +-1."""

    __slots__ = ("_b", "mask", "negmask")

    def __init__(self, bindings=None):
        b = {}
        items = bindings.items() if isinstance(bindings, Mapping) else (bindings or ())
        for var, val in items:
            var = int(var)
            if var < 1:
                raise DimensionError(f"variable {var} must be >= 1")
            if val not in (-1, 1):
                raise ValueError(f"value {val} for x{var} is not +-1")
            if var in b:
                raise ValueError(f"variable x{var} bound twice")
            b[var] = int(val)
        self._b = dict(sorted(b.items()))
        self.mask = sum(1 << (v - 1) for v in self._b)
        self.negmask = sum(1 << (v - 1) for v, s in self._b.items() if s == -1)

    def __getitem__(self, k):
        return self._b[k]

    def __iter__(self):
        return iter(self._b)

    def __len__(self):
        return len(self._b)

    def __hash__(self):
        return hash(tuple(self._b.items()))

    def __eq__(self, other):
        if isinstance(other, PartialAssignment):
            return self._b == other._b
        if isinstance(other, Mapping):
            return self._b == dict(other)
        return NotImplemented

    def __repr__(self):
        return "PartialAssignment({" + ", ".join(f"{k}: {v}" for k, v in self._b.items()) + "})"

    def extend(self, var, value):
        if var in self._b:
            raise ValueError(f"variable x{var} already bound")
        return PartialAssignment({**self._b, var: value})

    def check(self, n):
        for v in self._b:
            if v > n:
                raise DimensionError(f"assignment binds x{v} but n={n}")

    def free_variables(self, n):
        return [i for i in range(1, n + 1) if i not in self._b]

    def matches(self, n):
        """Boolean mask over cube indices of the points consistent with this assignment."""
        idx = np.arange(1 << n, dtype=np.int64)
        want = self.mask & ~self.negmask
        return (idx & self.mask) == want

    def to_json(self):
        return {str(k): v for k, v in self._b.items()}


class BooleanFn:
    """A +-1 valued function on the cube, stored as an int8 table in index order."""

    __slots__ = ("n", "table", "provenance", "zero_count")

    def __init__(self, n, table, provenance="table", zero_count=0):
        check_cap(n)
        arr = np.asarray(table, dtype=np.int8).reshape(-1)
        if arr.shape[0] != 1 << n:
            raise DimensionError(f"table has {arr.shape[0]} entries, expected {1 << n}")
        if not np.all((arr == 1) | (arr == -1)):
            raise ValueError("table entries must be +-1")
        arr = arr.copy()
        arr.flags.writeable = False
        self.n = n
        self.table = arr
        self.provenance = provenance
        self.zero_count = zero_count

    @classmethod
    def from_callable(cls, n, fn, provenance="table"):
        check_cap(n)
        return cls(n, [fn(point_from_index(j, n)) for j in range(1 << n)], provenance)

    @classmethod
    def constant(cls, n, value=1):
        return cls(n, np.full(1 << n, value, dtype=np.int8), "constant")

    @classmethod
    def sign_of(cls, p, allow_zeros=False):
        """``sgn(p)`` on the cube, with sgn(0) mapped to +1.

        Zeros raise :class:`PreconditionError` unless ``allow_zeros``; the
        number of zeros is kept in ``zero_count``.
        """
        if p.exact:
            num, _ = cube_values_exact(p)
            num = np.asarray(num)
            pos = num > 0
            zeros = int(np.count_nonzero(num == 0))
        else:
            vals = cube_values(p)
            pos = vals > 0
            zeros = int(np.count_nonzero(vals == 0))
        if zeros and not allow_zeros:
            raise PreconditionError(f"polynomial vanishes at {zeros} cube point(s)")
        table = np.where(pos, 1, -1).astype(np.int8)
        if zeros:
            table[(num == 0) if p.exact else (vals == 0)] = 1
        return cls(p.n, table, "sign", zeros)

    def __call__(self, x):
        if len(x) != self.n:
            raise DimensionError(f"point has {len(x)} coordinates, function has n={self.n}")
        return int(self.table[index_from_point(x)])

    def __eq__(self, other):
        return isinstance(other, BooleanFn) and self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __neg__(self):
        return BooleanFn(self.n, -self.table, self.provenance)

    def __repr__(self):
        return f"BooleanFn(n={self.n}, provenance={self.provenance!r}, hex={self.to_hex()})"

    def to_hex(self):
        """Hex of the packed table: bit j (LSB first) is 1 when the value at index j is +1."""
        bits = (self.table == 1).astype(np.uint8)
        value = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")
        width = max(1, ((1 << self.n) + 3) // 4)
        return format(value, f"0{width}x")

    @classmethod
    def from_hex(cls, n, text, provenance="table"):
        check_cap(n)
        value = int(text, 16)
        if value >> (1 << n):
            raise DimensionError(f"hex table has bits beyond 2**{n}")
        nbytes = max(1, ((1 << n) + 7) // 8)
        raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[: 1 << n]
        return cls(n, np.where(bits == 1, 1, -1), provenance)

    def prob_one(self):
        """Exact ``Pr[h = +1]``."""
        return Fraction(int(np.count_nonzero(self.table == 1)), 1 << self.n)

    def agreement(self, other):
        if other.n != self.n:
            raise DimensionError("arity mismatch")
        return Fraction(int(np.count_nonzero(self.table == other.table)), 1 << self.n)

    def influence(self, i):
        """Exact ``Pr[h(x) != h(x with x_i flipped)]``."""
        _check_var(i, self.n)
        flipped = self.table[np.arange(1 << self.n) ^ (1 << (i - 1))]
        return Fraction(int(np.count_nonzero(flipped != self.table)), 1 << self.n)

    def influences(self):
        return [self.influence(i) for i in range(1, self.n + 1)]

    def restrict(self, assignment):
        """Restriction to the free variables (renumbered in order)."""
        a = assignment if isinstance(assignment, PartialAssignment) else PartialAssignment(assignment)
        a.check(self.n)
        return BooleanFn(len(a.free_variables(self.n)), self.table[a.matches(self.n)], self.provenance)

    def walsh(self):
        return walsh_transform(self)


def influence_bool(h, i):
    return h.influence(i)


def walsh_transform(h):
    """Exact Fourier expansion of a boolean function."""
    return MultilinearPoly.from_cube_values(h.table.astype(np.int64), h.n)


def inverse_walsh(p, provenance="walsh"):
    """Boolean function with the given Fourier expansion (values must be +-1)."""
    num, den = cube_values_exact(p)
    num = np.asarray(num)
    if not np.all((num == den) | (num == -den)):
        raise PreconditionError("polynomial is not +-1 valued on the cube")
    return BooleanFn(p.n, np.where(num == den, 1, -1).astype(np.int8), provenance)


__all__ = [
    "BooleanFn",
    "CapExceeded",
    "MultilinearPoly",
    "PartialAssignment",
    "compose_linear",
    "cube_points",
    "cube_values",
    "cube_values_exact",
    "evaluate",
    "fwht",
    "influence_bool",
    "influence_real",
    "influences_real",
    "inverse_walsh",
    "l2sq",
    "max_influence",
    "restrict",
    "split_variable",
    "stats",
    "walsh_transform",
]
