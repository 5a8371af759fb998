"""Two-step box mollification of ``sgn(G)``.

First the sign is dilated, ``G'(z') = max of sgn(G) over the cube of
half-width tau/2 around z'``, then averaged, ``G~(z) = mean of G' over the
cube of half-width tau/2 around z``.  Convention: ``sgn(0) = +1``.

The result dominates ``sgn(G)`` everywhere and equals it at distance more
than tau (sup norm) from the zero set of G.  It is ``(2m/tau)``-Lipschitz in
the sup norm, up to quadrature effects for m >= 2.
"""

import numpy as np

from ptfkit.errors import CapExceeded, PreconditionError
from ptfkit.realpoly import RealPoly
from ptfkit.sandwich.evaluators import RealFunctionEvaluator

MAX_M = 3
DEFAULT_CELLS = {2: 128, 3: 64}
ROOT_IMAG_TOL = 1e-9
POINT_CHUNK = 4096


def _merge(intervals):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(iv) for iv in out]


def positive_intervals(G):
    """Closed intervals whose union is ``{z : G(z) >= 0}`` for univariate G."""
    coefs = G.univariate_coefficients()  # coefs[i] multiplies z^i
    while len(coefs) > 1 and coefs[-1] == 0:
        coefs = coefs[:-1]
    if len(coefs) == 1:
        return [(-np.inf, np.inf)] if float(coefs[0]) >= 0 else []
    c = np.array([float(v) for v in coefs])
    raw = np.roots(c[::-1])
    scale = max(1.0, float(np.max(np.abs(raw))))
    roots = np.unique(np.round(raw[np.abs(raw.imag) <= ROOT_IMAG_TOL * scale].real, 14))
    cuts = [-np.inf, *roots.tolist(), np.inf]

    def value(z):
        return float(np.polynomial.polynomial.polyval(z, c))

    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        if np.isinf(a) and np.isinf(b):
            mid = 0.0
        elif np.isinf(a):
            mid = b - 1.0
        elif np.isinf(b):
            mid = a + 1.0
        else:
            mid = 0.5 * (a + b)
        if value(mid) >= 0:
            pieces.append((a, b))
    pieces.extend((r, r) for r in roots.tolist())
    return _merge(pieces)


class MollifiedSign(RealFunctionEvaluator):
    """Evaluator for the mollified sign of a :class:`RealPoly` G.

    ``mode`` is ``"closed-form"`` (m = 1), ``"multiaffine"`` (rows along
    axis 1 are exact, the other axes use midpoint quadrature) or
    ``"generic"`` (quadrature everywhere, with a conservative dilation test).
    """

    def __init__(self, G, tau, cells=None):
        if tau <= 0:
            raise PreconditionError("tau must be positive")
        if G.m > MAX_M:
            raise CapExceeded(f"mollification quadrature supports m <= {MAX_M}")
        super().__init__(self._evaluate_points, G.m, lipschitz=2 * G.m / tau,
                         value_range=(-1.0, 1.0), name="G~")
        self.G = G
        self.tau = float(tau)
        self.half = self.tau / 2
        self.cells = cells or DEFAULT_CELLS.get(G.m, 0)
        if G.m > 1 and self.cells < 64:
            raise PreconditionError("quadrature needs at least 64 cells per axis")
        if G.m == 1:
            self.mode = "closed-form"
            self.dilated = _merge((a - self.half, b + self.half) for a, b in positive_intervals(G))
        elif G.is_multiaffine:
            self.mode = "multiaffine"
        else:
            self.mode = "generic"

    # -- m = 1 -----------------------------------------------------------
    def _closed_form(self, z):
        h = self.half
        covered = np.zeros_like(z)
        for a, b in self.dilated:
            covered += np.clip(np.minimum(z + h, b) - np.maximum(z - h, a), 0.0, None)
        return np.clip(covered / h - 1.0, -1.0, 1.0)

    # -- m >= 2, multi-affine ------------------------------------------------
    def _offsets(self):
        Q = self.cells
        return -self.half + (np.arange(Q) + 0.5) * (2 * self.half / Q)

    def _row_thresholds(self, rest):
        """Per-row dilated set along axis 1, from rest points of shape (..., R, m-1).

        ``rest`` holds the row coordinates (axes 2..m).  Returns ``(full, l, u)``
        so that each row's dilated set is R if full, else
        ``(-inf, u] U [l, inf)``.
        """
        m = self.m
        h = self.half
        verts = np.array(np.meshgrid(*([[-h, h]] * (m - 1)), indexing="ij")).reshape(m - 1, -1).T
        pts = rest[..., None, :] + verts  # (..., R, V, m-1)
        flat = pts.reshape(-1, m - 1)
        zeros = np.zeros((flat.shape[0], 1))
        b = self.G.evaluate(np.hstack([zeros, flat])).reshape(pts.shape[:-1])
        a = self.G.evaluate(np.hstack([zeros + 1.0, flat])).reshape(pts.shape[:-1]) - b
        with np.errstate(divide="ignore", invalid="ignore"):
            root = -b / a
        full = np.any((a == 0) & (b >= 0), axis=-1)
        l = np.min(np.where(a > 0, root - h, np.inf), axis=-1)
        u = np.max(np.where(a < 0, root + h, -np.inf), axis=-1)
        full |= l <= u
        return full, l, u

    def _row_lengths(self, z1, full, l, u):
        h = self.half
        lo = z1 - h
        hi = z1 + h
        with np.errstate(invalid="ignore"):
            left = np.clip(u - lo, 0.0, 2 * h)
            right = np.clip(hi - l, 0.0, 2 * h)
        left = np.where(np.isneginf(u), 0.0, left)
        right = np.where(np.isposinf(l), 0.0, right)
        return np.where(full, 2 * h, left + right)

    def _rest_samples(self, rest_centre):
        """Quadrature nodes over axes 2..m around each centre, shape (N, R, m-1)."""
        off = self._offsets()
        grids = np.meshgrid(*([off] * (self.m - 1)), indexing="ij")
        cells = np.stack([g.ravel() for g in grids], axis=-1)
        return rest_centre[:, None, :] + cells[None, :, :]

    def _multiaffine(self, pts):
        rest = self._rest_samples(pts[:, 1:])
        full, l, u = self._row_thresholds(rest)
        lengths = self._row_lengths(pts[:, :1], full, l, u)
        return np.clip(lengths.mean(axis=1) / self.half - 1.0, -1.0, 1.0)

    # -- generic m >= 2 --------------------------------------------------------
    def _dilated_generic(self, pts):
        """Conservative ``G'``: +1 unless G is certainly negative on the box."""
        h = self.half
        m = self.m
        grid = np.array(np.meshgrid(*([[-h, 0.0, h]] * m), indexing="ij")).reshape(m, -1).T
        samples = pts[:, None, :] + grid[None, :, :]
        vals = self.G.evaluate(samples.reshape(-1, m)).reshape(samples.shape[:2])
        radius = float(np.max(np.abs(pts))) + h
        slack = self.G.lipschitz_bound(radius) * h / 2
        return np.where(vals.max(axis=1) + slack >= 0, 1.0, -1.0)

    def _generic(self, pts):
        off = self._offsets()
        grids = np.meshgrid(*([off] * self.m), indexing="ij")
        cells = np.stack([g.ravel() for g in grids], axis=-1)
        out = np.empty(pts.shape[0])
        for i, p in enumerate(pts):
            out[i] = self._dilated_generic(p + cells).mean()
        return out

    def _evaluate_points(self, pts):
        if self.mode == "closed-form":
            return self._closed_form(pts[:, 0])
        fn = self._multiaffine if self.mode == "multiaffine" else self._generic
        out = np.empty(pts.shape[0])
        step = max(1, POINT_CHUNK // max(1, self.cells ** (self.m - 1) // 64))
        for s in range(0, pts.shape[0], step):
            out[s:s + step] = fn(pts[s:s + step])
        return out

    # -- tensor grids ------------------------------------------------------------
    def grid(self, axes):
        axes = [np.asarray(a, dtype=float) for a in axes]
        if self.mode == "closed-form":
            return self._closed_form(axes[0])
        if self.mode == "multiaffine" and self.m == 2:
            return self._grid_2d(axes[0], axes[1])
        return super().grid(axes)

    def _grid_2d(self, xs, ys):
        """Sum clipped ramps over all rows with sorted thresholds and prefix sums."""
        h = self.half
        Q = self.cells
        rest = ys[:, None, None] + self._offsets()[None, :, None]
        full, l, u = self._row_thresholds(rest)
        out = np.empty((len(xs), len(ys)))
        lo = xs - h
        hi = xs + h
        for j in range(len(ys)):
            total = np.full(len(xs), 2 * h * np.count_nonzero(full[j]))
            ls = np.sort(l[j][~full[j] & np.isfinite(l[j])])
            if ls.size:
                cum = np.concatenate([[0.0], np.cumsum(ls)])
                i1 = np.searchsorted(ls, lo, "right")
                i2 = np.searchsorted(ls, hi, "left")
                total += 2 * h * i1 + (i2 - i1) * hi - (cum[i2] - cum[i1])
            us = np.sort(u[j][~full[j] & np.isfinite(u[j])])
            if us.size:
                cum = np.concatenate([[0.0], np.cumsum(us)])
                i1 = np.searchsorted(us, lo, "right")
                i2 = np.searchsorted(us, hi, "left")
                total += 2 * h * (us.size - i2) + (cum[i2] - cum[i1]) - (i2 - i1) * lo
            out[:, j] = total
        return np.clip(out / (Q * h) - 1.0, -1.0, 1.0)

    # -- diagnostics -------------------------------------------------------------
    def quadrature_error_estimate(self, points, refine=4):
        """Estimate of ``|quadrature - exact average|`` as row variation / cells.

        Row values are sampled ``refine`` times more finely along axes 2..m;
        the midpoint rule errs by at most the per-axis total variation over
        the cell count.  Returns 0 for the closed form.
        """
        if self.mode == "closed-form":
            return 0.0
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        fine = self.cells * refine
        ts = -self.half + (np.arange(fine) + 0.5) * (2 * self.half / fine)
        worst = 0.0
        for p in pts:
            rest = np.tile(p[1:], (fine, 1))
            rest[:, 0] += ts
            full, l, u = self._row_thresholds(rest[None])
            rows = self._row_lengths(p[:1], full, l, u)[0] / self.half - 1.0
            worst = max(worst, float(np.abs(np.diff(rows)).sum()) / self.cells)
        return worst

    def in_zero_neighbourhood(self, points):
        """Whether the closed cube of half-width tau around each point meets ``G = 0``.

        Exact for m = 1 and multi-affine G (extremes over a box sit at
        vertices); conservative via the Lipschitz slack otherwise.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.m == 1 and pts.shape[1] != 1:
            pts = pts.reshape(-1, 1)
        t = self.tau
        if self.m == 1:
            roots = [a for a, b in positive_intervals(self.G) for a in (a, b) if np.isfinite(a)]
            if not roots:
                return np.zeros(pts.shape[0], dtype=bool)
            r = np.array(roots)
            return np.min(np.abs(pts[:, :1] - r[None, :]), axis=1) <= t
        if self.mode == "multiaffine":
            verts = np.array(np.meshgrid(*([[-t, t]] * self.m), indexing="ij")).reshape(self.m, -1).T
            vals = self.G.evaluate((pts[:, None, :] + verts[None]).reshape(-1, self.m))
            vals = vals.reshape(pts.shape[0], -1)
            return (vals.min(axis=1) <= 0) & (vals.max(axis=1) >= 0)
        centre = self.G.evaluate(pts)
        slack = self.G.lipschitz_bound(float(np.max(np.abs(pts))) + t) * t
        return np.abs(centre) <= slack


def mollify_sign(G, m=None, tau=None, cells=None):
    """Mollified ``sgn(G)`` as an evaluator; ``m`` is checked against ``G.m``."""
    if not isinstance(G, RealPoly):
        raise TypeError("mollify_sign expects a RealPoly")
    if m is not None and m != G.m:
        raise ValueError("m does not match the polynomial")
    if tau is None:
        raise ValueError("tau is required")
    return MollifiedSign(G, tau, cells)


def sign(values):
    """``sgn`` with ``sgn(0) = +1``."""
    return np.where(np.asarray(values) >= 0, 1.0, -1.0)
