"""Exact PET induction on tuples of vector-valued variable polynomials."""
from .coeff import CoeffExpr, parse_coeff
from .levels import (InclusionReport, LevelAssignment, LevelReport, LinearCoeff, SeminormSpec,
                     group_inclusion, level_check, linear_coeffs, multinomial, seminorm_spec,
                     top_difference)
from .poly import PetPolynomial
from .sample import random_tuple
from .tuples import PetTuple, VdcRecord, choose_t, make_tuple, reduce, step_budget, unit, vdc

__all__ = [
    "CoeffExpr", "parse_coeff", "PetPolynomial", "PetTuple", "VdcRecord", "make_tuple", "vdc",
    "reduce", "choose_t", "step_budget", "unit", "LevelAssignment", "LevelReport",
    "level_check", "InclusionReport", "group_inclusion", "top_difference", "LinearCoeff",
    "linear_coeffs", "SeminormSpec", "seminorm_spec", "multinomial", "random_tuple",
]
