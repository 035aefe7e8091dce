"""Tests for the explicit polynomial feature map."""

from __future__ import annotations

from math import comb

import numpy as np
import pytest

from app.errors import ConfigError, DimensionMismatchError
from app.features import enumerate_monomials, explicit_feature_matrix, explicit_features, feature_residuals
from app.kernels import PolynomialKernel, SampleMatrix, kernel_eval
from app.selection import approximation_errors


@pytest.mark.parametrize("d,q", [(1, 1), (2, 3), (3, 2), (5, 3), (6, 4)])
def test_dictionary_size(d: int, q: int) -> None:
    assert len(enumerate_monomials(d, q)) == comb(d + q, q)


def test_graded_lex_order_with_constant_first() -> None:
    dictionary = enumerate_monomials(2, 2)

    assert dictionary.names == ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]
    assert dictionary[0].multi_index == (2, 0, 0)
    assert dictionary.position((1, 1)) == 4


def test_prefactors_follow_multinomial_coefficients() -> None:
    dictionary = enumerate_monomials(2, 3, kappa=2.0)

    # x1*x2: 3! / (1! 1! 1!) * 2^1
    assert dictionary[dictionary.position((1, 1))].prefactor == pytest.approx(12.0)
    # constant: kappa^3
    assert dictionary[0].prefactor == pytest.approx(8.0)
    # x2^3: 3! / 3! * kappa^0
    assert dictionary[dictionary.position((0, 3))].prefactor == pytest.approx(1.0)


def test_homogeneous_kernel_zeroes_lower_degree_terms() -> None:
    dictionary = enumerate_monomials(2, 2, kappa=0.0)

    assert dictionary[0].prefactor == 0.0
    assert dictionary[dictionary.position((1, 0))].prefactor == 0.0
    assert dictionary[dictionary.position((2, 0))].prefactor == 1.0


def test_feature_inner_products_equal_kernel(rng: np.random.Generator) -> None:
    for _ in range(200):
        d = int(rng.integers(1, 7))
        q = int(rng.integers(1, 5))
        kappa = float(rng.uniform(0.0, 2.0))
        x, y = rng.uniform(-1, 1, d), rng.uniform(-1, 1, d)
        dictionary = enumerate_monomials(d, q, kappa)

        lhs = float(explicit_features(x, dictionary) @ explicit_features(y, dictionary))
        rhs = kernel_eval(PolynomialKernel(kappa, q), x, y)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-9)


def test_kernel_errors_equal_explicit_residuals(rng: np.random.Generator) -> None:
    spec = PolynomialKernel(1.0, 2)
    dictionary = enumerate_monomials(3, 2, 1.0)
    X = SampleMatrix(rng.uniform(-1, 1, (3, 30)))
    X_tilde = X.subset([0, 1, 2, 3, 4])

    kernel_side = approximation_errors(spec, X_tilde, X)
    explicit_side = feature_residuals(
        explicit_feature_matrix(X_tilde, dictionary), explicit_feature_matrix(X, dictionary)
    )

    assert np.allclose(kernel_side, explicit_side, atol=1e-8)


def test_invalid_arguments() -> None:
    with pytest.raises(ConfigError):
        enumerate_monomials(0, 3)
    with pytest.raises(ConfigError):
        enumerate_monomials(2, 0)
    with pytest.raises(ConfigError):
        enumerate_monomials(2, 2, kappa=-1.0)
    with pytest.raises(DimensionMismatchError):
        explicit_feature_matrix(np.ones((3, 2)), enumerate_monomials(2, 2))
