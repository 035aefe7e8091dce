"""Polynomial feature space: monomial dictionaries and coefficient recovery."""

from .monomials import (
    MonomialDictionary,
    MonomialIndex,
    enumerate_monomials,
    explicit_feature_matrix,
    explicit_features,
    feature_residuals,
    raw_monomials,
)
from .coefficients import (
    CoefficientMatrix,
    exact_fpu_coefficients,
    fpu_polynomials,
    recover_coefficients,
    relative_coefficient_error,
)

__all__ = [
    "MonomialIndex",
    "MonomialDictionary",
    "enumerate_monomials",
    "raw_monomials",
    "explicit_feature_matrix",
    "explicit_features",
    "feature_residuals",
    "CoefficientMatrix",
    "fpu_polynomials",
    "exact_fpu_coefficients",
    "recover_coefficients",
    "relative_coefficient_error",
]
