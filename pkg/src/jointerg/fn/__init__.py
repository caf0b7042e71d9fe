"""Closed-form functions: exact differentiation, mpmath evaluation, growth diagnostics."""
from .expr import SmoothExpr, diff, evaluate, parse, polynomial_coeffs
from .growth import (GrowthDecomposition, GrowthProfile, TemperedProfile, decompose,
                     diverges, eventual_sign, growth_degree, growth_profile, is_fejer,
                     tempered_alpha, tends_to_zero)

__all__ = [
    "SmoothExpr", "diff", "evaluate", "parse", "polynomial_coeffs",
    "GrowthDecomposition", "GrowthProfile", "TemperedProfile", "decompose", "diverges",
    "eventual_sign", "growth_degree", "growth_profile", "is_fejer", "tempered_alpha",
    "tends_to_zero",
]
