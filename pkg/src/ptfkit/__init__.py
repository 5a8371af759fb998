"""Tools for polynomial threshold functions on the boolean cube.

Exact Fourier machinery, greedy regularization, tail bounds, k-wise
independent distributions and sandwiching polynomials.
"""

from ptfkit.errors import CapExceeded, DimensionError, PreconditionError, PtfkitError, ZeroPolynomialError
from ptfkit.fourier import (
    BooleanFn,
    MultilinearPoly,
    PartialAssignment,
    compose_linear,
    evaluate,
    influence_bool,
    influence_real,
    inverse_walsh,
    max_influence,
    restrict,
    stats,
    walsh_transform,
)
from ptfkit.realpoly import RealPoly

__version__ = "0.1.0"

__all__ = [
    "BooleanFn",
    "CapExceeded",
    "DimensionError",
    "MultilinearPoly",
    "PartialAssignment",
    "PreconditionError",
    "PtfkitError",
    "RealPoly",
    "ZeroPolynomialError",
    "compose_linear",
    "evaluate",
    "influence_bool",
    "influence_real",
    "inverse_walsh",
    "max_influence",
    "restrict",
    "stats",
    "walsh_transform",
]
