"""Sandwiching polynomials for thresholds of functions of a few linear forms.

For ``f = G(g_1, ..., g_m)`` the upper polynomial is built as

1. mollify ``sgn(G)`` at width tau (zero neighbourhoods shrink with tau),
2. interpolate the mollified sign after rescaling ``[-4A, 4A]^m`` to the
   unit box, with measured sup error at most a quarter of the side budget,
3. shift up and add an even-power growth term so the result dominates the
   mollified sign on all of ``R^m``,
4. evaluate on the cube images ``(g_1(x), ..., g_m(x))`` and multilinearize.

The lower polynomial is the negated upper polynomial for ``-G``.
"""

from fractions import Fraction
import math

import numpy as np

from ptfkit.concentration import interval_mass, linear_tail_moment
from ptfkit.errors import CapExceeded, PreconditionError, ZeroPolynomialError, check_cap
from ptfkit.fourier import (
    BooleanFn,
    MultilinearPoly,
    compose_linear,
    cube_values,
    cube_values_exact,
    l2sq,
)
from ptfkit.io import jsonable, poly_from_json, poly_to_json
from ptfkit.kwise import POINTWISE_SLACK, SandwichPair, check_pointwise
from ptfkit.realpoly import RealPoly
from ptfkit.sandwich.chebyshev import growth_bound_check, probe_count, tensor_chebyshev
from ptfkit.sandwich.evaluators import Rescaled
from ptfkit.sandwich.mollify import MollifiedSign, sign

DEFAULT_C_C = 3.0
L2_TOLERANCE = 1e-12
EVAL_CHUNK = 1 << 22
K_START = 16
K_MAX = {1: 1 << 14, 2: 6000, 3: 120}


# -- lifting -------------------------------------------------------------------

class LiftedPoly:
    """``q(z) = p_k(z / s) + shift + 4 sum_j (2 z_j / s)^{k'}`` with ``s = 4A``.

    Evaluated in log space where the terms are huge; the growth term is
    nonnegative because ``k'`` is even.
    """

    def __init__(self, base, shift, kprime, scale):
        if kprime % 2:
            raise ValueError("growth exponent must be even")
        self.base = base
        self.shift = float(shift)
        self.kprime = int(kprime)
        self.scale = float(scale)
        self.m = base.m

    @property
    def degree(self):
        return max(self.base.degree, self.kprime)

    def growth(self, w):
        """The growth term at rescaled points w (may be inf)."""
        w = np.asarray(w, dtype=float).reshape(-1, self.m)
        with np.errstate(over="ignore", divide="ignore"):
            return 4.0 * np.sum(np.abs(2.0 * w) ** self.kprime, axis=1)

    def evaluate(self, z):
        z = np.asarray(z, dtype=float).reshape(-1, self.m)
        out = np.empty(z.shape[0])
        step = max(1, EVAL_CHUNK // (self.base.k + 1))
        for s in range(0, z.shape[0], step):
            out[s:s + step] = self._evaluate(z[s:s + step] / self.scale)
        return out

    def __call__(self, z):
        return self.evaluate(z)

    def _evaluate(self, w):
        mant, logs = self.base.evaluate_scaled(w)
        with np.errstate(divide="ignore"):
            log_growth = math.log(4.0) + _logsumexp(self.kprime * np.log(np.abs(2.0 * w)))
            log_base = np.log(np.abs(mant)) + logs
        big = np.maximum(log_growth, log_base) > 600
        out = np.empty(w.shape[0])
        small = ~big
        with np.errstate(over="ignore", invalid="ignore"):
            out[small] = (mant[small] * np.exp(logs[small]) + self.shift
                          + np.exp(log_growth[small]))
            top = np.maximum(log_growth[big], log_base[big])
            scaled = (np.exp(log_growth[big] - top)
                      + np.sign(mant[big]) * np.exp(log_base[big] - top))
            out[big] = np.where(scaled > 0, np.inf, np.where(scaled < 0, -np.inf, self.shift))
        return out

    def to_json(self):
        return {"base": self.base.to_json(), "shift": self.shift, "kprime": self.kprime,
                "scale": self.scale}


def _logsumexp(a):
    top = np.max(a, axis=1)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(invalid="ignore"):
        return safe + np.log(np.sum(np.exp(a - safe[:, None]), axis=1))


def growth_exponent(degree, m, eps):
    """Smallest even integer ``>= max(degree, 4m/eps)``."""
    k = max(int(degree), math.ceil(4 * m / float(eps) - 1e-12))
    return k + (k % 2)


def lift_and_rescale(p_k, m, eps, A):
    """Shift and lift a box approximation so it dominates F on all of ``R^m``.

    ``p_k`` approximates ``F'(w) = F(4A w)`` on ``[-1, 1]^m`` with measured
    sup error at most ``eps / 2``.  The result q satisfies ``q >= F``
    everywhere and ``q <= F + eps`` (up to a growth term below ``4m 2^{-k'}``)
    on ``[-A, A]^m``.
    """
    if p_k.m != m:
        raise ValueError("m does not match the approximation")
    err = p_k.measured_error
    if err is None or err > eps / 2:
        raise PreconditionError(f"sup error {err} exceeds eps/2 = {eps / 2}")
    return LiftedPoly(p_k, eps / 2, growth_exponent(p_k.degree, m, eps), 4 * float(A))


def verify_lift(q, F, A, eps, per_axis=None, outer=5.0):
    """Probe ``q >= F`` on ``[-outer A, outer A]^m`` and ``q - F <= eps`` on ``[-A, A]^m``."""
    m = q.m
    per_axis = per_axis or (4001 if m == 1 else 121 if m == 2 else 25)
    wide = np.linspace(-outer * A, outer * A, per_axis)
    inner = np.linspace(-A, A, per_axis)
    res = {}
    for name, axis in (("outer", wide), ("inner", inner)):
        mesh = np.stack(np.meshgrid(*([axis] * m), indexing="ij"), axis=-1).reshape(-1, m)
        diff = q.evaluate(mesh) - F.evaluate(mesh)
        res[name] = diff
    below = float(np.min(res["outer"]))
    above = float(np.max(res["inner"]))
    return {
        "min_q_minus_F": below,
        "max_q_minus_F_inner": above,
        "dominates": bool(below >= -POINTWISE_SLACK),
        "close": bool(above <= eps),
        "probes": int(res["outer"].size + res["inner"].size),
    }


# -- decompositions --------------------------------------------------------------

class LinearFormDecomposition:
    """``f = G(g_1, ..., g_m)`` with unit-norm linear forms ``g_j`` on n bits."""

    def __init__(self, G, forms, c_C=DEFAULT_C_C):
        if not isinstance(G, RealPoly):
            raise TypeError("G must be a RealPoly")
        forms = list(forms)
        if len(forms) != G.m:
            raise ValueError(f"G has {G.m} variables but {len(forms)} forms were given")
        n = forms[0].n
        for j, g in enumerate(forms, 1):
            if g.n != n:
                raise ValueError("forms must share the same n")
            if g.degree > 1:
                raise PreconditionError(f"form {j} has degree {g.degree}")
            norm = l2sq(g)
            if g.exact and norm != 1:
                raise PreconditionError(f"form {j} has E[g^2] = {norm}, expected 1")
            if not g.exact and abs(float(norm) - 1) > L2_TOLERANCE:
                raise PreconditionError(f"form {j} has E[g^2] = {float(norm)}, expected 1")
        self.G = G
        self.forms = forms
        self.m = G.m
        self.n = n
        self.c_C = float(c_C)

    @property
    def exact(self):
        return all(g.exact for g in self.forms) and all(
            not isinstance(c, float) for _, c in self.G.items())

    def composed(self):
        """The multilinear polynomial f on the cube."""
        return compose_linear(self.G, self.forms)

    def z_values(self):
        """Cube images, shape ``(2^n, m)``."""
        return np.stack([cube_values(g) for g in self.forms], axis=1)

    def f_values(self):
        """Exact values of f as Fractions when possible, else floats."""
        if self.exact:
            num, den = cube_values_exact(self.composed())
            return [Fraction(int(v), den) for v in num]
        return self.G.evaluate(self.z_values())

    def sign_function(self):
        """``sgn(f)`` on the cube (``sgn(0) = +1``)."""
        fl = np.array([float(v) for v in self.f_values()])
        return BooleanFn(self.n, sign(fl).astype(np.int8), "sgn(f)")

    def cube_radius(self, eps):
        return self.c_C * math.sqrt(math.log(self.m / float(eps)))

    def to_json(self):
        return {"G": self.G.to_json(), "forms": [poly_to_json(g) for g in self.forms],
                "c_C": self.c_C}

    @classmethod
    def from_json(cls, data):
        return cls(RealPoly.from_json(data["G"]), [poly_from_json(g) for g in data["forms"]],
                   data.get("c_C", DEFAULT_C_C))


# -- parameters -------------------------------------------------------------------

def anti_concentration_radius(abs_values, eps):
    """Largest alpha with ``Pr[|f| < alpha] < eps/100`` over the given values."""
    vals = sorted(abs_values)
    allowed = math.ceil(len(vals) * Fraction(str(eps)) / 100) - 1
    return vals[min(allowed, len(vals) - 1)]


def _lift_budget(err, eps):
    """Per-side lift budget: twice the measured error, floored at ``eps/4``."""
    return max(2 * err, eps / 4)


def _next_degree(k, k_max, err, gap, eps):
    if err > eps / 2:
        factor = 1.1 * err / (eps / 2)
    else:
        factor = 1.1 * gap / eps
    return min(k_max, max(k + 2, math.ceil(k * min(3.0, max(1.15, factor)))))


def _budget(q_vals, hv, nbd, outside, eps_side):
    excess = q_vals - hv
    N = len(hv)
    region = ~nbd & ~outside
    return {
        "approximation_region": {
            "mass": float(np.count_nonzero(region)) / N,
            "contribution": float(np.sum(excess[region])) / N,
            "max_excess": float(np.max(excess[region])) if region.any() else 0.0,
            "holds": bool(not region.any() or np.max(excess[region]) <= eps_side + 1e-9),
            "verified": True,
        },
        "zero_neighbourhood": {
            "mass": float(np.count_nonzero(nbd)) / N,
            "contribution": float(np.sum(excess[nbd])) / N,
            "verified": True,
        },
        "tail": {
            "mass": float(np.count_nonzero(outside)) / N,
            "contribution": float(np.sum(excess[outside])) / N,
            "verified": True,
        },
    }


def build_threshold_sandwich(dec, eps, clip="cube", alpha=None, c_C=None, cells=None,
                             k_start=K_START, k_max=None, probe_factor=2, max_n=None):
    """Sandwiching polynomials ``p_l <= sgn(f) <= p_u`` on the cube with small gap.

    ``clip`` picks the clip radius A: ``"cube"`` (default, the largest
    ``|g_j(x)|``, so no cube point falls outside the box), ``"theory"``
    (``ceil(phi ln phi)``) or a number.  Returns a :class:`SandwichPair`
    whose diagnostics list the parameters, the degree search, the lift
    checks and the three error-budget terms for each side.
    """
    n, m = dec.n, dec.m
    check_cap(n, max_n)
    eps = float(eps)
    if not 0 < eps < 2:
        raise ValueError("eps must lie in (0, 2)")
    if dec.G.degree == 0 and not dec.G.terms:
        raise ZeroPolynomialError("G is identically zero")
    Z = dec.z_values()
    fvals = dec.f_values()
    zero_idx = [j for j, v in enumerate(fvals) if v == 0]
    if zero_idx:
        raise PreconditionError(f"f vanishes at {len(zero_idx)} cube points")
    fl = np.array([float(v) for v in fvals])
    hv = sign(fl)
    h = BooleanFn(n, hv.astype(np.int8), "sgn(f)")
    diagnostics = {"n": n, "m": m, "eps": eps}

    if np.all(hv == hv[0]):
        c = int(hv[0])
        const = MultilinearPoly.constant(n, c)
        diagnostics.update({"path": "margin", "sign": c})
        return SandwichPair(const, const, 0, Fraction(0), True, diagnostics)

    # anti-concentration
    f_poly = dec.composed() if dec.exact else None
    abs_vals = [abs(v) for v in fvals]
    if alpha is None:
        alpha = anti_concentration_radius(abs_vals, eps)
    if f_poly is not None:
        mass = interval_mass(f_poly, 0, alpha, strict=True)["mass"]
    else:
        mass = float(np.mean(np.abs(fl) < float(alpha)))
    if not mass < Fraction(str(eps)) / 100:
        raise PreconditionError(f"anti-concentration fails: Pr[|f| < {float(alpha):.6g}] = "
                                f"{float(mass):.6g} >= eps/100")
    alpha_f = float(alpha)

    # parameters
    c_C = dec.c_C if c_C is None else float(c_C)
    C = c_C * math.sqrt(math.log(m / eps))
    L = max(dec.G.lipschitz_bound(C), 1.0)
    tau = alpha_f / L
    phi = m ** 2.5 * L / (alpha_f * eps)
    A_theory = math.ceil(phi * math.log(phi)) if phi > 1 else 1
    zmax = float(np.max(np.abs(Z)))
    if clip == "cube":
        A = zmax
    elif clip == "theory":
        A = float(A_theory)
    else:
        A = float(clip)
    if not A > 0:
        raise PreconditionError("clip radius must be positive")
    diagnostics.update({
        "path": "pipeline",
        "alpha": alpha_f,
        "anti_concentration_mass": float(mass),
        "c_C": c_C,
        "C": C,
        "L": L,
        "tau": tau,
        "phi": phi,
        "A": A,
        "A_theory": A_theory,
        "clip": clip if isinstance(clip, str) else "given",
    })
    tail_checks = []
    for j, g in enumerate(dec.forms, 1):
        try:
            res = linear_tail_moment(g, phi, A)
            tail_checks.append({"form": j, "moment": res["moment"], "bound": res["bound"],
                                "holds": res["holds"]})
        except PreconditionError as exc:
            tail_checks.append({"form": j, "skipped": str(exc)})
    diagnostics["tail_moment_checks"] = tail_checks

    uniq, inverse = np.unique(Z, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    outside = np.any(np.abs(Z) > A, axis=1)
    k_max = k_max or K_MAX.get(m, 64)
    specs = (("upper", dec.G, 1.0), ("lower", -dec.G, -1.0))
    mollified = {name: MollifiedSign(Gs, tau, cells) for name, Gs, _ in specs}
    extra = uniq / (4 * A)
    history = []
    k = k_start
    while True:
        approx = {name: tensor_chebyshev(Rescaled(mollified[name], 4 * A), m, k,
                                         probes=probe_count(k, probe_factor), extra_points=extra)
                  for name, _, _ in specs}
        err = max(p.measured_error for p in approx.values())
        gap = None
        if err <= eps / 2:
            lifted = {name: lift_and_rescale(p, m, _lift_budget(p.measured_error, eps), A)
                      for name, p in approx.items()}
            qvals = {name: q.evaluate(uniq)[inverse] for name, q in lifted.items()}
            gap = float(np.mean(qvals["upper"] + qvals["lower"]))
        history.append({"k": k, "error": err, "gap": gap})
        if gap is not None and gap <= eps:
            break
        if k >= k_max:
            raise CapExceeded(f"degree budget exceeded at k={k} (error {err:.4g}, gap {gap}); "
                              f"A={A:.6g}, phi={phi:.6g}")
        k = _next_degree(k, k_max, err, gap if gap is not None else 2 * eps, eps)
    diagnostics["degree_search"] = history

    sides = {}
    values = {}
    for name, _, flip in specs:
        q, p, mol = lifted[name], approx[name], mollified[name]
        qv = qvals[name]
        values[name] = flip * qv
        nbd = np.asarray(mol.in_zero_neighbourhood(uniq))[inverse]
        eps_lift = _lift_budget(p.measured_error, eps)
        growth = [growth_bound_check(p, w) for w in _growth_probes(m)]
        sides[name] = {
            "k_per_axis": p.k,
            "degree": q.degree,
            "kprime": q.kprime,
            "measured_error": p.measured_error,
            "lift_budget": eps_lift,
            "shift": q.shift,
            "sup_abs": p.sup_abs,
            "mollifier": mol.mode,
            "quadrature_error_estimate": mol.quadrature_error_estimate(uniq[:64]),
            "lift": verify_lift(q, mol, A, eps_lift),
            "growth_checks_hold": all(g["holds"] for g in growth),
            "budget": _budget(qv, flip * hv, nbd, outside, eps_lift),
        }
    diagnostics["sides"] = sides

    p_u = MultilinearPoly.from_cube_values(values["upper"])
    p_l = MultilinearPoly.from_cube_values(values["lower"])
    ok, witness, worst = check_pointwise(h, p_l, p_u)
    gap = float(np.mean(values["upper"] - values["lower"]))
    diagnostics.update({
        "real_degree": max(s["degree"] for s in sides.values()),
        "pointwise": {"ok": ok, "witness": witness, "worst_violation": worst},
        "gap": gap,
        "gap_ok": bool(gap <= eps),
    })
    return SandwichPair(p_l, p_u, None, gap, ok, diagnostics)


def _growth_probes(m):
    pts = []
    for w in (0.5, 1.0, 1.5, 3.0):
        z = np.zeros(m)
        z[0] = w
        pts.append(z)
        pts.append(np.full(m, -w))
    return pts


def decomposition_from_spec(spec, c_C=DEFAULT_C_C):
    """Named decompositions: ``sum:n`` (normalized sum, m = 1) and
    ``maj-product:b`` (product of normalized sums over two disjoint blocks of
    b variables, m = 2)."""
    name, _, rest = spec.partition(":")
    if name == "sum":
        from ptfkit.families import normalized_sum

        return LinearFormDecomposition(RealPoly.variable(1, 1), [normalized_sum(int(rest))], c_C)
    if name == "maj-product":
        b = int(rest)
        r = math.isqrt(b)
        s = Fraction(1, r) if r * r == b else 1 / math.sqrt(b)
        g1 = MultilinearPoly.linear([s] * b + [0] * b)
        g2 = MultilinearPoly.linear([0] * b + [s] * b)
        return LinearFormDecomposition(RealPoly(2, {(1, 1): 1}), [g1, g2], c_C)
    raise ValueError(f"unknown decomposition spec {spec!r}")


def load_pair(prefix):
    """Read the files written by :func:`pair_to_files`."""
    from ptfkit.io import read_json

    p_l = poly_from_json(read_json(f"{prefix}.p_l.json"))
    p_u = poly_from_json(read_json(f"{prefix}.p_u.json"))
    diagnostics = read_json(f"{prefix}.diagnostics.json")
    return SandwichPair(p_l, p_u, None, None, bool(diagnostics.get("pointwise", {}).get("ok", False)),
                        diagnostics)


def pair_to_files(pair, prefix):
    """Serialize a pair as two polynomial files and a diagnostics file."""
    from ptfkit.io import write_json

    write_json(f"{prefix}.p_l.json", poly_to_json(pair.p_l))
    write_json(f"{prefix}.p_u.json", poly_to_json(pair.p_u))
    write_json(f"{prefix}.diagnostics.json", jsonable(pair.diagnostics))


__all__ = [
    "LiftedPoly",
    "LinearFormDecomposition",
    "anti_concentration_radius",
    "build_threshold_sandwich",
    "decomposition_from_spec",
    "load_pair",
    "growth_exponent",
    "lift_and_rescale",
    "pair_to_files",
    "verify_lift",
]
