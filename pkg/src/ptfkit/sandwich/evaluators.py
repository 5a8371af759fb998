"""Callable real functions on R^m with optional fast tensor-grid evaluation."""

import numpy as np

GRID_CHUNK = 1 << 20


class RealFunctionEvaluator:
    """Wraps ``fn: (N, m) array -> (N,) array`` with declared metadata.

    ``grid(axes)`` evaluates on the tensor grid ``axes[0] x ... x axes[m-1]``
    and returns an array of shape ``(len(axes[0]), ..., len(axes[m-1]))``;
    subclasses override it when the grid structure can be exploited.
    """

    def __init__(self, fn, m, lipschitz=None, value_range=None, name="F"):
        self._fn = fn
        self.m = m
        self.lipschitz = lipschitz
        self.value_range = value_range
        self.name = name

    def evaluate(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.m) if self.m > 1 else pts.reshape(-1, 1)
        if pts.shape[1] != self.m:
            raise ValueError(f"expected points with {self.m} coordinates")
        return np.asarray(self._fn(pts), dtype=float)

    def __call__(self, points):
        return self.evaluate(points)

    def grid(self, axes):
        axes = [np.asarray(a, dtype=float) for a in axes]
        shape = tuple(len(a) for a in axes)
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.m)
        out = np.empty(mesh.shape[0])
        for start in range(0, mesh.shape[0], GRID_CHUNK):
            out[start:start + GRID_CHUNK] = self.evaluate(mesh[start:start + GRID_CHUNK])
        return out.reshape(shape)

    def check_range(self, values, slack=1e-12):
        if self.value_range is None:
            return True
        lo, hi = self.value_range
        v = np.asarray(values)
        return bool(np.all(v >= lo - slack) and np.all(v <= hi + slack))


class Rescaled(RealFunctionEvaluator):
    """``w -> inner(scale * w)``."""

    def __init__(self, inner, scale):
        lip = None if inner.lipschitz is None else inner.lipschitz * abs(scale)
        super().__init__(lambda w: inner.evaluate(w * scale), inner.m, lip, inner.value_range,
                         f"{inner.name}(x{scale:g})")
        self.inner = inner
        self.scale = scale

    def grid(self, axes):
        return self.inner.grid([np.asarray(a, dtype=float) * self.scale for a in axes])


def from_callable(fn, m, **kw):
    return RealFunctionEvaluator(fn, m, **kw)


def polynomial_evaluator(G):
    """Evaluator for a :class:`ptfkit.realpoly.RealPoly`."""
    return RealFunctionEvaluator(G.evaluate, G.m, name="G")
