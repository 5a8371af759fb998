"""Tensor Chebyshev interpolation with measured error and growth bounds.

Polynomials are stored as Chebyshev coefficient tensors on ``[-1, 1]^m``.
Outside the box they are evaluated in scaled form so huge values do not
overflow: ``p(w) = mantissa * exp(log_scale)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from scipy import fft

from ptfkit.errors import CapExceeded
from ptfkit.realpoly import RealPoly

MAX_M = 3
NODE_BUDGET = 1 << 25
FULL_PROBE_BUDGET = 1 << 23
MIN_PROBES = 64
MONOMIAL_MAX_K = 40
COLUMN_SLAB = 256


def chebyshev_nodes(k):
    """First-kind nodes ``cos(pi (j + 1/2) / (k + 1))``, j = 0..k (descending)."""
    return np.cos(np.pi * (np.arange(k + 1) + 0.5) / (k + 1))


def probe_points(P):
    """Second-kind points ``cos(pi i / P)``, i = 0..P (descending)."""
    return np.cos(np.pi * np.arange(P + 1) / P)


def chebyshev_T(k, w):
    """``T_k(w)`` by the three-term recurrence (exact for integer or Fraction w)."""
    if k == 0:
        return w * 0 + 1
    prev, cur = w * 0 + 1, w
    for _ in range(k - 1):
        prev, cur = cur, 2 * w * cur - prev
    return cur


def dubiner_ratio(k, w):
    """``|T_k(w)| / (|w| + sqrt(w^2 - 1))^k`` for ``|w| >= 1``."""
    w = float(w)
    if abs(w) < 1:
        raise ValueError("ratio is defined for |w| >= 1")
    rho = abs(w) + math.sqrt(w * w - 1)
    return abs(float(chebyshev_T(k, w))) / rho ** k


def _scaled_T(k, w):
    """Matrix ``T_j(w_i) / s_i`` for j = 0..k and the log scales ``log s_i``.

    ``s_i = rho_i^k`` with ``rho_i = |w_i| + sqrt(w_i^2 - 1)`` when
    ``|w_i| > 1``, else 1.
    """
    w = np.asarray(w, dtype=float)
    j = np.arange(k + 1)
    out = np.empty((w.size, k + 1))
    logs = np.zeros(w.size)
    inside = np.abs(w) <= 1
    if inside.any():
        out[inside] = np.cos(np.outer(np.arccos(w[inside]), j))
    if (~inside).any():
        a = np.abs(w[~inside])
        # log(a + sqrt(a^2 - 1)) without squaring huge a
        log_rho = np.log(a) + np.log1p(np.sqrt(1.0 - 1.0 / (a * a)))
        # (rho^{j-k} + rho^{-j-k}) / 2, sign (-1)^j for negative w
        vals = 0.5 * (np.exp(np.outer(log_rho, j - k)) + np.exp(np.outer(log_rho, -j - k)))
        neg = w[~inside] < 0
        vals[neg] *= np.where(j % 2 == 0, 1.0, -1.0)
        out[~inside] = vals
        logs[~inside] = k * log_rho
    return out, logs


@dataclass
class ChebyshevPoly:
    """``sum_J c_J prod_i T_{j_i}(w_i)`` with per-axis degree ``k``."""

    coeffs: np.ndarray
    measured_error: float = None
    sup_abs: float = None
    meta: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.coeffs.ndim

    @property
    def k(self):
        return self.coeffs.shape[0] - 1

    @property
    def degree(self):
        """Total degree bound ``m * k`` of the tensor expansion."""
        return self.m * self.k

    def evaluate_scaled(self, points):
        """Return ``(mantissa, log_scale)`` with ``p = mantissa * exp(log_scale)``."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.m)
        mats, logs = zip(*(_scaled_T(self.k, pts[:, i]) for i in range(self.m)))
        C = self.coeffs
        if self.m == 1:
            mant = mats[0] @ C
        elif self.m == 2:
            mant = np.einsum("nj,nj->n", mats[0] @ C, mats[1])
        else:
            mant = np.einsum("nij,ni,nj->n", np.tensordot(mats[0], C, axes=(1, 0)), mats[1], mats[2])
        return mant, np.sum(logs, axis=0)

    def evaluate(self, points):
        mant, logs = self.evaluate_scaled(points)
        with np.errstate(over="ignore", invalid="ignore"):
            return mant * np.exp(logs)

    def __call__(self, points):
        return self.evaluate(points)

    def to_monomial(self):
        """Monomial-basis :class:`RealPoly` (float); ill-conditioned beyond small k."""
        if self.k > MONOMIAL_MAX_K:
            raise CapExceeded(f"monomial conversion is limited to k <= {MONOMIAL_MAX_K}")
        C = self.coeffs
        for axis in range(self.m):
            C = np.apply_along_axis(_cheb_to_power, axis, C)
        terms = {idx: float(v) for idx, v in np.ndenumerate(C) if v != 0}
        return RealPoly(self.m, terms)

    def to_json(self):
        return {
            "m": self.m,
            "k": self.k,
            "measured_error": self.measured_error,
            "sup_abs": self.sup_abs,
            "coeffs": self.coeffs.ravel().tolist(),
        }

    @classmethod
    def from_json(cls, data):
        m, k = int(data["m"]), int(data["k"])
        C = np.asarray(data["coeffs"], dtype=float).reshape((k + 1,) * m)
        return cls(C, data.get("measured_error"), data.get("sup_abs"))


def _cheb_to_power(c):
    out = np.zeros_like(c)
    p = npcheb.cheb2poly(c)
    out[:len(p)] = p
    return out


def _coefficients(values):
    C = values
    N = values.shape[0]
    for axis in range(values.ndim):
        C = fft.dct(C, type=2, axis=axis) / N
        idx = [slice(None)] * values.ndim
        idx[axis] = 0
        C[tuple(idx)] *= 0.5
    return C


def _values_on_probes(C, P, axes):
    """``sum_j c_j cos(pi i j / P)`` along the given axes via DCT-I."""
    for axis in axes:
        pad = [(0, 0)] * C.ndim
        pad[axis] = (0, P + 1 - C.shape[axis])
        X = np.pad(C, pad)
        Y = fft.dct(X, type=1, axis=axis)
        first = np.take(X, [0], axis=axis)
        C = 0.5 * (Y + first)  # the x_P term is zero since k < P
    return C


def probe_count(k, factor=2):
    return max(MIN_PROBES, factor * (k + 1))


def measure_error(poly, F, P=None, extra_points=None):
    """Max ``|p - F|`` on the second-kind probe grid (and extra points).

    Also returns the max ``|p|`` seen, used as the constant in growth checks.
    """
    m, k = poly.m, poly.k
    P = P or probe_count(k)
    pts = probe_points(P)
    err = 0.0
    sup = 0.0
    if (P + 1) ** m <= FULL_PROBE_BUDGET:
        vals = _values_on_probes(poly.coeffs, P, range(m))
        diff = vals - F.grid([pts] * m)
        err = float(np.max(np.abs(diff)))
        sup = float(np.max(np.abs(vals)))
    elif m == 2:
        half = _values_on_probes(poly.coeffs, P, [1])
        for s in range(0, P + 1, COLUMN_SLAB):
            cols = _values_on_probes(half[:, s:s + COLUMN_SLAB], P, [0])
            ref = F.grid([pts, pts[s:s + COLUMN_SLAB]])
            err = max(err, float(np.max(np.abs(cols - ref))))
            sup = max(sup, float(np.max(np.abs(cols))))
    else:
        raise CapExceeded("probe grid too large")
    if extra_points is not None and len(extra_points):
        ex = np.asarray(extra_points, dtype=float).reshape(-1, m)
        vals = poly.evaluate(ex)
        err = max(err, float(np.max(np.abs(vals - F.evaluate(ex)))))
        sup = max(sup, float(np.max(np.abs(vals))))
    return err, sup


def tensor_chebyshev(F, m, k, probes=None, extra_points=None):
    """Interpolate F at the tensor Chebyshev nodes of per-axis degree k.

    Returns a :class:`ChebyshevPoly` whose ``measured_error`` is the max
    deviation from F over a probe grid with at least 64 points per axis
    (default ``2(k+1)``), plus any ``extra_points``.
    """
    if m != F.m:
        raise ValueError("m does not match the evaluator")
    if m > MAX_M:
        raise CapExceeded(f"tensor interpolation supports m <= {MAX_M}")
    if k < 0:
        raise ValueError("k must be >= 0")
    if m * (k + 1) ** m > NODE_BUDGET:
        raise CapExceeded(f"{(k + 1) ** m} nodes exceed the evaluation budget")
    nodes = chebyshev_nodes(k)
    values = np.asarray(F.grid([nodes] * m), dtype=float).reshape((k + 1,) * m)
    poly = ChebyshevPoly(_coefficients(values))
    poly.measured_error, poly.sup_abs = measure_error(poly, F, probes, extra_points)
    poly.meta = {"nodes": k + 1, "probes_per_axis": (probes or probe_count(k)) + 1}
    return poly


def growth_bound_check(p, z, c=None, degree=None):
    """Check ``|p(z)| <= c * max(|2 z_max|^deg, 1)``.

    ``p`` is a :class:`ChebyshevPoly` (c defaults to its measured sup on the
    box) or a :class:`RealPoly` (c must be given).  Comparison is done in
    log space so large arguments do not overflow.
    """
    z = np.asarray(z, dtype=float).ravel()
    if isinstance(p, ChebyshevPoly):
        c = p.sup_abs if c is None else c
        degree = p.degree if degree is None else degree
        mant, logs = p.evaluate_scaled(z[None, :])
        mant, logs = float(mant[0]), float(logs[0])
    else:
        if c is None:
            raise ValueError("c is required for non-Chebyshev polynomials")
        degree = p.degree if degree is None else degree
        mant, logs = float(p.evaluate(z)), 0.0
    zmax = float(np.max(np.abs(z)))
    log_c = math.log(c) if c > 0 else -math.inf
    log_bound = log_c + (max(degree * math.log(2 * zmax), 0.0) if zmax > 0 else 0.0)
    log_value = -math.inf if mant == 0 else math.log(abs(mant)) + logs
    holds = log_value <= log_bound + 1e-12
    return {
        "value": _safe_exp(log_value),
        "bound": _safe_exp(log_bound),
        "log_value": log_value,
        "log_bound": log_bound,
        "holds": bool(holds),
    }


def _safe_exp(x):
    if x == -math.inf:
        return 0.0
    return math.exp(x) if x < 700 else math.inf


__all__ = [
    "ChebyshevPoly",
    "chebyshev_T",
    "chebyshev_nodes",
    "dubiner_ratio",
    "growth_bound_check",
    "measure_error",
    "probe_points",
    "tensor_chebyshev",
]
