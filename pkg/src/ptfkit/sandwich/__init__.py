"""Mollified signs, Chebyshev approximation and sandwiching polynomials."""

from ptfkit.sandwich.chebyshev import (
    ChebyshevPoly,
    chebyshev_T,
    dubiner_ratio,
    growth_bound_check,
    tensor_chebyshev,
)
from ptfkit.sandwich.evaluators import RealFunctionEvaluator, Rescaled
from ptfkit.sandwich.mollify import MollifiedSign, mollify_sign
from ptfkit.sandwich.pipeline import (
    LiftedPoly,
    LinearFormDecomposition,
    build_threshold_sandwich,
    decomposition_from_spec,
    lift_and_rescale,
    load_pair,
    pair_to_files,
    verify_lift,
)
from ptfkit.realpoly import lipschitz_bound

__all__ = [
    "ChebyshevPoly",
    "LiftedPoly",
    "LinearFormDecomposition",
    "MollifiedSign",
    "RealFunctionEvaluator",
    "Rescaled",
    "build_threshold_sandwich",
    "chebyshev_T",
    "decomposition_from_spec",
    "dubiner_ratio",
    "growth_bound_check",
    "lift_and_rescale",
    "lipschitz_bound",
    "load_pair",
    "mollify_sign",
    "pair_to_files",
    "tensor_chebyshev",
    "verify_lift",
]
