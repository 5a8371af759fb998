"""k-wise independent distributions and exact fooling measurements.

The generator evaluates a random polynomial of degree < k over GF(2^m) at
n distinct field elements and keeps the trace bit of each value.  Every k
of the field values are jointly uniform, and traces of independent uniform
field elements are independent uniform bits, so the n output bits are
k-wise independent.  Enumerating all q^k seed polynomials gives an exact
distribution with 2^{mk} (not necessarily distinct) support points.

Support points are stored as cube indices (bit i-1 set when x_i = +1);
a trace bit 0 becomes +1 and 1 becomes -1.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import math

import numpy as np

from ptfkit import gf2m
from ptfkit.errors import CapExceeded, DimensionError, check_cap
from ptfkit.fourier import (
    BooleanFn,
    MultilinearPoly,
    PartialAssignment,
    cube_values,
    cube_values_exact,
    fwht,
    popcounts,
    to_rational,
    vars_from_mask,
)

SUPPORT_CAP = 1 << 24
POINTWISE_SLACK = 1e-9


@dataclass
class KWiseDistribution:
    """Uniform distribution on a multiset of cube points."""

    n: int
    k: int
    support: np.ndarray
    m: int = None
    seed: object = None
    construction: str = "gf2m"
    exact: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        if self.support.ndim != 1 or self.support.size == 0:
            raise ValueError("support must be a nonempty 1-d array of point indices")
        if self.n < 63 and (self.support.min() < 0 or self.support.max() >> self.n):
            raise DimensionError("support point outside the cube")

    @property
    def size(self):
        return int(self.support.size)

    def points(self):
        """Support as an int8 array of shape (size, n) with +-1 entries."""
        bits = (self.support[:, None] >> np.arange(self.n, dtype=np.int64)) & 1
        return (2 * bits - 1).astype(np.int8)

    def histogram(self):
        """Multiplicity of every cube point (length 2^n)."""
        check_cap(self.n)
        return np.bincount(self.support, minlength=1 << self.n).astype(np.int64)

    def prob(self, h):
        """Exact ``Pr_K[h = +1]``."""
        if h.n != self.n:
            raise DimensionError("arity mismatch")
        return Fraction(int(np.count_nonzero(h.table[self.support] == 1)), self.size)

    def condition(self, assignment):
        """Support points consistent with ``assignment``, over the free variables (renumbered)."""
        a = assignment if isinstance(assignment, PartialAssignment) else PartialAssignment(assignment)
        a.check(self.n)
        want = a.mask & ~a.negmask
        keep = self.support[(self.support & a.mask) == want]
        free = a.free_variables(self.n)
        packed = np.zeros(keep.size, dtype=np.int64)
        for pos, v in enumerate(free):
            packed |= ((keep >> (v - 1)) & 1) << pos
        return packed, len(free)

    def to_text(self):
        seed = "none" if self.seed is None else str(self.seed)
        m = "none" if self.m is None else str(self.m)
        header = (f"# ptfkit-kwise n={self.n} k={self.k} m={m} seed={seed} "
                  f"construction={self.construction} exact={int(self.exact)}")
        width = max(1, (self.n + 3) // 4)
        rows = [format(int(v), f"0{width}x") for v in self.support]
        return "\n".join([header] + rows) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("# ptfkit-kwise"):
            raise ValueError("missing distribution header")
        fields = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
        seed = None if fields.get("seed", "none") == "none" else fields["seed"]
        if seed is not None and seed.lstrip("-").isdigit():
            seed = int(seed)
        m = None if fields.get("m", "none") == "none" else int(fields["m"])
        support = np.array([int(r, 16) for r in lines[1:]], dtype=np.int64)
        return cls(int(fields["n"]), int(fields["k"]), support, m, seed,
                   fields.get("construction", "gf2m"), fields.get("exact", "1") == "1")


def full_cube(n, k=None):
    """The uniform distribution on all of {-1,1}^n (n-wise independent)."""
    check_cap(n)
    return KWiseDistribution(n, n if k is None else k, np.arange(1 << n, dtype=np.int64),
                             None, None, "full-cube", True)


def smallest_field(n):
    m = 1
    while (1 << m) < n:
        m += 1
    return m


def evaluation_points(n, m, seed=None):
    """n distinct elements of GF(2^m): 0..n-1, or a seeded random choice."""
    if seed is None:
        return np.arange(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(1 << m, size=n, replace=False)).astype(np.int64)


def _packed_trace_tables(alphas, k, m):
    """``tables[j][c] = sum_i Tr(c * alpha_i^j) << i``."""
    mul = gf2m.mul_table(m)
    tr = gf2m.trace_table(m)
    size = 1 << m
    tables = []
    powers = np.ones(len(alphas), dtype=np.int64)
    for _ in range(k):
        bits = tr[mul[np.arange(size)[:, None], powers[None, :]]]  # (size, n)
        packed = (bits << np.arange(len(alphas), dtype=np.int64)).sum(axis=1)
        tables.append(packed.astype(np.int64))
        powers = mul[powers, alphas]
    return tables


def generate_kwise(n, k, seed=None, m=None, sample=False, samples=1 << 16, cap=SUPPORT_CAP):
    """Exact k-wise independent distribution on {-1,1}^n.

    When ``k >= n`` the full cube is returned (it is the only n-wise
    independent distribution and is never larger than the field
    construction).  If ``2^{mk}`` exceeds ``cap``, pass ``sample=True`` to
    draw ``samples`` random seed polynomials instead; such output is flagged
    ``exact=False`` and carries no independence guarantee.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if k >= n and not sample:
        return full_cube(n, k)
    if m is None:
        m = smallest_field(n)
    if (1 << m) < n:
        raise ValueError(f"GF(2^{m}) has fewer than n={n} elements")
    if m > 8:
        raise ValueError("fields beyond GF(2^8) are not tabulated")
    alphas = evaluation_points(n, m, seed)
    tables = _packed_trace_tables(alphas, k, m)
    mask = (1 << n) - 1
    if m * k > 62 or (1 << (m * k)) > cap:
        if not sample:
            raise CapExceeded(f"support 2^{m * k} exceeds the cap {cap}; use sample=True")
        rng = np.random.default_rng(np.random.SeedSequence([0 if seed is None else int(seed), n, k, m]))
        coeffs = rng.integers(0, 1 << m, size=(samples, k))
        packed = np.zeros(samples, dtype=np.int64)
        for j in range(k):
            packed ^= tables[j][coeffs[:, j]]
        return KWiseDistribution(n, k, (~packed) & mask, m, seed, "gf2m-sampled", False)
    packed = tables[0]
    for j in range(1, k):
        packed = (tables[j][:, None] ^ packed[None, :]).ravel()
    return KWiseDistribution(n, k, (~packed) & mask, m, seed, "gf2m", True)


def character_sums(K):
    """``sum_{x in support} chi_S(x)`` for every mask S (exact integers)."""
    hist = K.histogram()
    return fwht(hist) * (1 - 2 * (popcounts(K.n) & 1))


def verify_kwise(K, k):
    """Check that every character of size 1..k has zero bias over the support.

    Returns ``(ok, violator, bias)`` where the violator is the smallest
    offending variable set (by size, then lexicographically) and bias is
    its exact ``E_K[chi_S]``.
    """
    if K.size == 0:
        raise ValueError("empty support")
    sums = character_sums(K)
    sizes = popcounts(K.n)
    bad = np.nonzero((sums != 0) & (sizes >= 1) & (sizes <= k))[0]
    if bad.size == 0:
        return True, None, Fraction(0)
    smallest = sizes[bad].min()
    candidates = [vars_from_mask(int(s)) for s in bad[sizes[bad] == smallest]]
    violator = min(candidates)
    mask = sum(1 << (v - 1) for v in violator)
    return False, violator, Fraction(int(sums[mask]), K.size)


def equidistributed(K, k):
    """True when every set of at most k coordinates shows all patterns equally often."""
    for size in range(1, min(k, K.n) + 1):
        if K.size % (1 << size):
            return False
        expected = K.size >> size
        for subset in combinations(range(K.n), size):
            code = np.zeros(K.size, dtype=np.int64)
            for pos, i in enumerate(subset):
                code |= ((K.support >> i) & 1) << pos
            counts = np.bincount(code, minlength=1 << size)
            if not np.all(counts == expected):
                return False
    return True


def _boolean_error(h, K):
    return abs(h.prob_one() - K.prob(h))


def fooling_error(target, K, thresholds=None):
    """Exact fooling error of ``K`` against the uniform distribution.

    ``target`` is a :class:`BooleanFn` (error in ``Pr[h = +1]``) or a
    :class:`MultilinearPoly` (sup over thresholds t of the CDF gap
    ``|Pr_U[f <= t] - Pr_K[f <= t]|``, either over ``thresholds`` or over all
    real t).
    """
    if isinstance(target, BooleanFn):
        return _boolean_error(target, K)
    if isinstance(target, tuple):
        target, thresholds = target
    if not isinstance(target, MultilinearPoly):
        raise TypeError("target must be a BooleanFn or a MultilinearPoly")
    if target.n != K.n:
        raise DimensionError("arity mismatch")
    check_cap(target.n)
    if target.exact:
        num, den = cube_values_exact(target)
        uni = np.asarray(num)
        if uni.dtype == object:
            raise CapExceeded("values too large for an exact CDF comparison")
        ts = None if thresholds is None else [Fraction(t) * den for t in thresholds]
    else:
        uni = cube_values(target)
        ts = None if thresholds is None else [float(t) for t in thresholds]
    sampled = uni[K.support]
    uni_sorted = np.sort(uni)
    k_sorted = np.sort(sampled)
    if ts is None:
        grid = np.unique(np.concatenate([uni_sorted, k_sorted]))
    else:
        # integer numerators: f <= t  iff  num <= floor(t * den)
        grid = np.array([math.floor(t) if target.exact else t for t in ts])
    cu = np.searchsorted(uni_sorted, grid, side="right").astype(object)
    ck = np.searchsorted(k_sorted, grid, side="right").astype(object)
    gaps = np.abs(cu * K.size - ck * (1 << K.n))
    return Fraction(int(gaps.max(initial=0)), K.size << K.n)


@dataclass
class SandwichPair:
    """Lower and upper polynomials around a boolean function."""

    p_l: MultilinearPoly
    p_u: MultilinearPoly
    degree: int = None
    measured_gap: object = None
    pointwise_verified: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.degree is None:
            self.degree = max(self.p_l.degree, self.p_u.degree)
        if self.measured_gap is None:
            self.measured_gap = (self.p_u - self.p_l).terms.get(0, 0)

    def to_json(self):
        from ptfkit.io import number_to_json, poly_to_json

        return {
            "p_l": poly_to_json(self.p_l),
            "p_u": poly_to_json(self.p_u),
            "degree": self.degree,
            "measured_gap": number_to_json(self.measured_gap),
            "pointwise_verified": self.pointwise_verified,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_json(cls, data):
        from ptfkit.io import coef_from_json, poly_from_json

        return cls(poly_from_json(data["p_l"]), poly_from_json(data["p_u"]), int(data["degree"]),
                   coef_from_json(data["measured_gap"]), bool(data.get("pointwise_verified", False)),
                   dict(data.get("diagnostics", {})))


def check_pointwise(h, p_l, p_u, slack=POINTWISE_SLACK):
    """Check ``p_l <= h <= p_u`` at every cube point.

    Returns ``(ok, witness point or None, worst violation)``.  Rational pairs
    are compared exactly (no slack).
    """
    if p_l.n != h.n or p_u.n != h.n:
        raise DimensionError("arity mismatch")
    hv = h.table.astype(np.int64)
    if p_l.exact and p_u.exact:
        lo_num, lo_den = cube_values_exact(p_l)
        hi_num, hi_den = cube_values_exact(p_u)
        lo_excess = [Fraction(int(v), lo_den) - int(t) for v, t in zip(lo_num, hv)]
        hi_excess = [int(t) - Fraction(int(v), hi_den) for v, t in zip(hi_num, hv)]
        excess = [max(a, b) for a, b in zip(lo_excess, hi_excess)]
        worst = max(range(len(excess)), key=lambda j: excess[j])
        ok = excess[worst] <= 0
        return ok, (None if ok else _point(worst, h.n)), float(excess[worst])
    lo = cube_values(p_l)
    hi = cube_values(p_u)
    excess = np.maximum(lo - hv, hv - hi)
    worst = int(np.argmax(excess))
    ok = bool(excess[worst] <= slack)
    return ok, (None if ok else _point(worst, h.n)), float(excess[worst])


def _point(j, n):
    return tuple(1 if (j >> i) & 1 else -1 for i in range(n))


def sandwich_certificate(h, pair, K, eps):
    """Check (a) pointwise sandwich, (b) ``E_U[p_u - p_l] <= eps``, (c) fooling error ``<= eps``."""
    deg = max(pair.p_l.degree, pair.p_u.degree)
    degree_ok = deg <= K.k
    ok_a, witness, worst = check_pointwise(h, pair.p_l, pair.p_u)
    gap = (pair.p_u - pair.p_l).terms.get(0, 0)
    ok_b = gap <= eps + (POINTWISE_SLACK if isinstance(gap, float) else 0)
    fool = fooling_error(h, K)
    ok_c = fool <= eps
    kw_ok, _, _ = verify_kwise(K, deg) if K.n <= 24 else (None, None, None)
    return {
        "degree": deg,
        "k": K.k,
        "degree_ok": degree_ok,
        "kwise_verified": kw_ok,
        "pointwise": {"holds": ok_a, "witness": witness, "worst_excess": worst},
        "gap": {"value": gap, "eps": eps, "holds": bool(ok_b)},
        "fooling": {"value": fool, "eps": eps, "holds": bool(ok_c)},
        "valid": bool(degree_ok and ok_a and ok_b and ok_c),
    }


def leafwise_fooling(h, tree, K, per_leaf_eps, good_fraction):
    """Fooling through a decision tree with a (k + depth)-wise distribution.

    For every leaf the support is conditioned on the leaf's assignment and
    re-checked for (K.k - depth)-wise independence over the free variables;
    the leaf's fooling error is measured exactly.  The aggregate error
    must not exceed ``per_leaf_eps + (1 - good_fraction)`` whenever leaves
    fooled to within ``per_leaf_eps`` carry at least ``good_fraction`` of
    the leaf measure.
    """
    per_leaf_eps = to_rational(per_leaf_eps)
    depth = tree.depth
    k_leaf = K.k - depth
    leaves = []
    good_mass = Fraction(0)
    weighted = Fraction(0)
    all_kwise = True
    for leaf in tree.leaves():
        packed, n_free = K.condition(leaf.assignment)
        entry = {"assignment": leaf.assignment.to_json(), "depth": leaf.depth, "measure": leaf.measure}
        if packed.size == 0:
            entry.update({"empty": True, "kwise": False, "error": None})
            all_kwise = False
            leaves.append(entry)
            continue
        hl = h.restrict(leaf.assignment)
        mass_k = Fraction(int(packed.size), K.size)
        sub = KWiseDistribution(n_free, max(k_leaf, 0), packed, construction="conditioned")
        sub_ok = verify_kwise(sub, min(k_leaf, n_free))[0] if k_leaf > 0 else True
        err = fooling_error(hl, sub)
        all_kwise &= bool(sub_ok)
        if err <= per_leaf_eps:
            good_mass += leaf.measure
        weighted += leaf.measure * err
        entry.update({"empty": False, "kwise": bool(sub_ok), "error": err, "mass_under_K": mass_k,
                      "mass_matches": mass_k == leaf.measure})
        leaves.append(entry)
    total = fooling_error(h, K)
    per_leaf_eps, good_fraction = to_rational(per_leaf_eps), to_rational(good_fraction)
    allowed = per_leaf_eps + 1 - good_fraction
    hypothesis = good_mass >= good_fraction
    conclusion = total <= allowed
    return {
        "k_leaf": k_leaf,
        "leaves": leaves,
        "all_leaves_kwise": all_kwise,
        "good_mass": good_mass,
        "weighted_error": weighted,
        "total_error": total,
        "allowed": allowed,
        "hypothesis": bool(hypothesis),
        "holds": bool((not hypothesis) or conclusion),
    }


def save_distribution(path, K):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(K.to_text())


def load_distribution(path):
    with open(path, encoding="utf-8") as fh:
        return KWiseDistribution.from_text(fh.read())


__all__ = [
    "KWiseDistribution",
    "SandwichPair",
    "check_pointwise",
    "equidistributed",
    "fooling_error",
    "full_cube",
    "generate_kwise",
    "leafwise_fooling",
    "sandwich_certificate",
    "verify_kwise",
]
