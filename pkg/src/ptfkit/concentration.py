"""Tail, moment and anti-concentration quantities measured exactly on the cube.

Probabilities are exact Fractions obtained by enumerating all 2^n points.
Transcendental bounds are floats; comparisons against them add a slack of
``BOUND_SLACK`` to the bound side.
"""

from fractions import Fraction
import math

import numpy as np

from ptfkit.errors import PreconditionError, check_cap
from ptfkit.fourier import (
    cube_values,
    cube_values_exact,
    l2sq,
    normalize_coef,
    restrict,
    to_rational,
)

BOUND_SLACK = 1e-12


def _as_object(arr):
    return np.asarray(arr).astype(object)


def _count_abs_at_least(num, threshold_sq):
    """Count entries with ``num**2 >= threshold_sq`` (integers, exact)."""
    threshold_sq = Fraction(threshold_sq)
    if threshold_sq <= 0:
        return len(num)
    p, q = threshold_sq.numerator, threshold_sq.denominator
    s = math.isqrt(p // q)
    while s * s * q < p:
        s += 1
    while s > 0 and (s - 1) * (s - 1) * q >= p:
        s -= 1
    absn = np.abs(np.asarray(num))
    return int(np.count_nonzero(absn >= s))


def _exact_values(p):
    check_cap(p.n)
    if not p.exact:
        raise PreconditionError("exact mode needs rational coefficients")
    return cube_values_exact(p)


def tail_bound(d, t):
    """``2^{-(d/4) t^{2/d}}`` with d >= 1."""
    d = max(d, 1)
    return 2.0 ** (-(d / 4.0) * float(t) ** (2.0 / d))


def tail_bound_applies(d, t):
    """True when ``t >= 2^{d/2}``, i.e. ``t^2 >= 2^d`` (exact for rational t)."""
    d = max(d, 1)
    if isinstance(t, float):
        return t * t >= 2.0 ** d
    return Fraction(t) ** 2 >= 2 ** d


def tail_prob(p, t, normalize=False):
    """Exact ``Pr[|f| >= t]`` against ``2^{-(d/4) t^{2/d}}``.

    ``f`` must have ``E[f^2] = 1`` unless ``normalize=True``, in which case
    ``f / ||f||_2`` is used (still exact: the event is ``f^2 >= t^2 E[f^2]``).
    ``holds`` is None when ``t < 2^{d/2}``, where the bound is not claimed.
    """
    t = to_rational(t)
    norm_sq = l2sq(p)
    if norm_sq == 0:
        raise PreconditionError("zero polynomial")
    if not normalize and norm_sq != 1:
        raise PreconditionError(f"polynomial has E[f^2] = {norm_sq}, expected 1")
    d = max(p.degree, 1)
    if p.exact:
        num, den = _exact_values(p)
        count = _count_abs_at_least(num, Fraction(t) ** 2 * norm_sq * den * den)
        prob = Fraction(count, 1 << p.n)
    else:
        vals = cube_values(p)
        prob = float(np.mean(vals * vals >= float(t) ** 2 * float(norm_sq)))
    bound = tail_bound(d, t)
    applies = tail_bound_applies(d, t)
    holds = (float(prob) <= bound + BOUND_SLACK) if applies else None
    return {"prob": normalize_coef(prob) if not isinstance(prob, float) else prob,
            "bound": bound, "holds": holds, "applies": applies, "degree": d}


def achieved_abs_values(p):
    """Sorted distinct values of ``|f(x)|`` over the cube (exact)."""
    num, den = _exact_values(p)
    return sorted({normalize_coef(Fraction(abs(int(v)), den)) for v in np.unique(np.abs(np.asarray(num)))})


def tail_prob_grid(p, normalize=False):
    """``tail_prob`` at every achieved ``|f|`` value (normalized scale) where the bound applies."""
    norm_sq = l2sq(p)
    out = []
    d = max(p.degree, 1)
    num, den = _exact_values(p)
    for v in achieved_abs_values(p):
        # t = v / sqrt(norm_sq) may be irrational; compare on squares
        t_sq = Fraction(v) ** 2 / norm_sq
        if t_sq < 2 ** d:
            continue
        count = _count_abs_at_least(num, t_sq * norm_sq * den * den)
        prob = Fraction(count, 1 << p.n)
        t = math.sqrt(float(t_sq))
        bound = tail_bound(d, t)
        out.append({"t": t, "prob": prob, "bound": bound, "holds": float(prob) <= bound + BOUND_SLACK})
    return out


def moment(p, q):
    """Exact ``E[f^q]`` for an even integer q (rational coefficients)."""
    if q % 2 or q < 2:
        raise ValueError("exact moments need an even q >= 2")
    num, den = _exact_values(p)
    total = int(np.sum(_as_object(num) ** q))
    return normalize_coef(Fraction(total, den ** q * (1 << p.n)))


def q_norm(p, q):
    """``||f||_q`` against the hypercontractive bound ``(q-1)^{d/2} ||f||_2``.

    For rational coefficients the comparison is exact:
    ``E[f^q] <= (q-1)^{q d / 2} E[f^2]^{q/2}``.  Float coefficients fall back
    to floating point with a relative slack.
    """
    if q % 2 or q < 2:
        raise ValueError("q must be an even integer >= 2")
    d = p.degree
    if p.exact:
        mq = moment(p, q)
        m2 = l2sq(p)
        holds = Fraction(mq) <= Fraction(q - 1) ** (q * d // 2) * Fraction(m2) ** (q // 2)
        norm_q = float(mq) ** (1.0 / q)
        norm_2 = math.sqrt(float(m2))
    else:
        vals = cube_values(p)
        mq = float(np.mean(vals ** q))
        norm_q = mq ** (1.0 / q)
        norm_2 = math.sqrt(float(np.mean(vals ** 2)))
        holds = norm_q <= (q - 1) ** (d / 2.0) * norm_2 * (1 + 1e-12) + BOUND_SLACK
    return {
        "moment": mq,
        "norm_q": norm_q,
        "norm_2": norm_2,
        "hc_bound": (q - 1) ** (d / 2.0) * norm_2,
        "holds": bool(holds),
    }


def _gaussian_values(p, z):
    out = np.zeros(z.shape[0])
    for m, c in p.items():
        term = np.full(z.shape[0], float(c))
        i = 0
        while m:
            if m & 1:
                term = term * z[:, i]
            m >>= 1
            i += 1
        out += term
    return out


def interval_mass(p, t, alpha, mode="uniform", samples=10_000, seed=0, strict=False):
    """Mass of ``|f - t| <= alpha`` (``< alpha`` when ``strict``).

    ``mode="uniform"`` enumerates the cube exactly.  ``mode="gaussian"``
    feeds i.i.d. standard normals into the multilinear form and reports a
    Monte Carlo estimate with its standard error.
    """
    if mode == "uniform":
        t, alpha = to_rational(t), to_rational(alpha)
        if p.exact:
            num, den = _exact_values(p)
            scale = math.lcm(Fraction(t).denominator, Fraction(alpha).denominator)
            centre = int(Fraction(t) * scale) * den
            radius = int(Fraction(alpha) * scale) * den
            arr = np.asarray(num)
            if arr.dtype != object and int(np.abs(arr).max(initial=0)) * scale + abs(centre) >= (1 << 62):
                arr = arr.astype(object)
            dist = np.abs(arr * scale - centre)
            hit = dist < radius if strict else dist <= radius
            return {"mass": Fraction(int(np.count_nonzero(hit)), 1 << p.n), "stderr": None}
        vals = cube_values(p)
        dist = np.abs(vals - float(t))
        hit = dist < float(alpha) if strict else dist <= float(alpha)
        return {"mass": float(np.mean(hit)), "stderr": None}
    if mode == "gaussian":
        if samples < 10_000:
            raise ValueError("gaussian mode needs at least 10^4 samples")
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        z = rng.standard_normal((samples, p.n))
        dist = np.abs(_gaussian_values(p, z) - float(t))
        hit = dist < float(alpha) if strict else dist <= float(alpha)
        mass = float(np.mean(hit))
        return {"mass": mass, "stderr": math.sqrt(max(mass * (1 - mass), 0.0) / samples)}
    raise ValueError(f"unknown mode {mode!r}")


def _check_linear_unit(g):
    if g.degree > 1:
        raise PreconditionError("expected a linear form (degree <= 1)")
    if l2sq(g) != 1:
        raise PreconditionError(f"expected E[g^2] = 1, got {l2sq(g)}")


def leaf_l2_distribution(g, tree):
    """``[(E[(g|leaf)^2], leaf measure), ...]`` over the leaves of ``tree``."""
    _check_linear_unit(g)
    return [(l2sq(restrict(g, leaf.assignment, compress=False)), leaf.measure) for leaf in tree.leaves()]


def leaf_tail_bound(t):
    return 3.0 * math.exp(-float(t) / 8.0)


def leaf_l2_tail(g, tree, t):
    """Exact ``Pr_leaf[E[(g|leaf)^2] >= t]`` against ``3 e^{-t/8}``."""
    t = to_rational(t)
    prob = sum((w for v, w in leaf_l2_distribution(g, tree) if v >= t), Fraction(0))
    bound = leaf_tail_bound(t)
    return {"prob": normalize_coef(prob), "bound": bound, "holds": float(prob) <= bound + BOUND_SLACK}


def leaf_l2_tail_grid(g, tree):
    """``leaf_l2_tail`` at every achieved leaf value (plus t = 0)."""
    dist = leaf_l2_distribution(g, tree)
    grid = sorted({0} | {v for v, _ in dist})
    out = []
    for t in grid:
        prob = sum((w for v, w in dist if v >= t), Fraction(0))
        bound = leaf_tail_bound(t)
        out.append({"t": t, "prob": prob, "bound": bound, "holds": float(prob) <= bound + BOUND_SLACK})
    return out


def moment_tail_bound(c, A):
    """``3 e^{2cA ln A + 2c^2 - (A - 2c)^2 / 2}``."""
    c, A = float(c), float(A)
    return 3.0 * math.exp(2 * c * A * math.log(A) + 2 * c * c - 0.5 * (A - 2 * c) ** 2)


def linear_tail_moment(g, c, A):
    """Exact-probability ``E[|g|^{cA} 1_{|g| >= A}]`` against its tail bound."""
    _check_linear_unit(g)
    if not float(c) > 0 or float(A) < 2 * float(c):
        raise PreconditionError("need c > 0 and A >= 2c")
    A_exact = to_rational(A)
    num, den = _exact_values(g)
    vals, counts = np.unique(np.abs(np.asarray(num)), return_counts=True)
    expo = float(c) * float(A)
    total = 0.0
    for v, cnt in zip(vals, counts):
        value = Fraction(int(v), den)
        if value >= A_exact:
            total += float(Fraction(int(cnt), 1 << g.n)) * float(value) ** expo
    bound = moment_tail_bound(c, A)
    return {"moment": total, "bound": bound, "holds": total <= bound + BOUND_SLACK}


__all__ = [
    "achieved_abs_values",
    "interval_mass",
    "leaf_l2_distribution",
    "leaf_l2_tail",
    "leaf_l2_tail_grid",
    "linear_tail_moment",
    "moment",
    "q_norm",
    "tail_prob",
    "tail_prob_grid",
]
