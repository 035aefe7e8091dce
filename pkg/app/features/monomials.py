"""Explicit feature map of the polynomial kernel.

``(kappa + x^T x')^q = Psi(x)^T Psi(x')`` where ``Psi`` lists every
monomial of total degree at most ``q``, each scaled by the square root
of its multinomial prefactor. Monomials are kept in graded
lexicographic order with the constant term first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from app.errors import ConfigError, DimensionMismatchError
from app.kernels import SampleMatrix, as_vector, ensure_samples


@dataclass(frozen=True, slots=True)
class MonomialIndex:
    """Exponents ``(p_1, ..., p_d)`` of one monomial in a degree-``q`` dictionary.

    ``p_0 = q - sum(p_i)`` is the power carried by the constant ``kappa``.
    """

    powers: Tuple[int, ...]
    q: int
    kappa: float

    def __post_init__(self) -> None:
        if any(p < 0 for p in self.powers):
            raise ConfigError(f"Monomial exponents must be >= 0, got {self.powers}.")
        if sum(self.powers) > self.q:
            raise ConfigError(f"Monomial {self.powers} exceeds total degree {self.q}.")

    @property
    def p0(self) -> int:
        return self.q - sum(self.powers)

    @property
    def degree(self) -> int:
        return sum(self.powers)

    @property
    def multi_index(self) -> Tuple[int, ...]:
        return (self.p0, *self.powers)

    @property
    def prefactor(self) -> float:
        multinomial = math.factorial(self.q)
        for power in self.multi_index:
            multinomial //= math.factorial(power)
        return float(multinomial) * self.kappa**self.p0

    @property
    def name(self) -> str:
        factors = []
        for position, power in enumerate(self.powers, start=1):
            if power == 1:
                factors.append(f"x{position}")
            elif power > 1:
                factors.append(f"x{position}^{power}")
        return "*".join(factors) or "1"


@dataclass(frozen=True)
class MonomialDictionary:
    """Ordered monomials for dimension ``d`` and degree ``q``."""

    d: int
    q: int
    kappa: float
    terms: Tuple[MonomialIndex, ...]

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[MonomialIndex]:
        return iter(self.terms)

    def __getitem__(self, position: int) -> MonomialIndex:
        return self.terms[position]

    @property
    def names(self) -> List[str]:
        return [term.name for term in self.terms]

    @property
    def prefactors(self) -> np.ndarray:
        return np.array([term.prefactor for term in self.terms], dtype=np.float64)

    @property
    def exponents(self) -> np.ndarray:
        """``n x d`` integer matrix of exponents."""
        return np.array([term.powers for term in self.terms], dtype=np.int64).reshape(len(self.terms), self.d)

    def position(self, powers: Sequence[int]) -> int:
        return self._positions()[tuple(int(p) for p in powers)]

    def _positions(self) -> Dict[Tuple[int, ...], int]:
        return {term.powers: index for index, term in enumerate(self.terms)}


def _powers_from_variables(variables: Sequence[int], d: int) -> Tuple[int, ...]:
    powers = [0] * d
    for variable in variables:
        powers[variable] += 1
    return tuple(powers)


def enumerate_monomials(d: int, q: int, kappa: float = 1.0) -> MonomialDictionary:
    """All ``binomial(d + q, q)`` monomials of degree ``<= q`` in graded-lex order."""

    if int(d) != d or d < 1:
        raise ConfigError(f"Monomial dimension must be an integer >= 1, got {d}.")
    if int(q) != q or q < 1:
        raise ConfigError(f"Monomial degree must be an integer >= 1, got {q}.")
    if kappa < 0:
        raise ConfigError(f"kappa must be >= 0, got {kappa}.")

    d, q = int(d), int(q)
    terms = [
        MonomialIndex(_powers_from_variables(variables, d), q, float(kappa))
        for degree in range(q + 1)
        for variables in combinations_with_replacement(range(d), degree)
    ]
    return MonomialDictionary(d=d, q=q, kappa=float(kappa), terms=tuple(terms))


def raw_monomials(X: SampleMatrix | np.ndarray, dictionary: MonomialDictionary) -> np.ndarray:
    """Unscaled monomial values, ``n x m``."""

    samples = ensure_samples(X)
    if samples.d != dictionary.d:
        raise DimensionMismatchError(f"Dictionary is for d={dictionary.d}, got samples with d={samples.d}.")
    exponents = dictionary.exponents
    out = np.ones((len(dictionary), samples.m), dtype=np.float64)
    for variable in range(dictionary.d):
        powers = exponents[:, variable]
        if np.any(powers):
            out *= samples.data[variable][None, :] ** powers[:, None]
    return out


def explicit_feature_matrix(X: SampleMatrix | np.ndarray, dictionary: MonomialDictionary) -> np.ndarray:
    """``Psi_X`` with one feature column per sample."""
    return np.sqrt(dictionary.prefactors)[:, None] * raw_monomials(X, dictionary)


def explicit_features(x: Sequence[float] | np.ndarray, dictionary: MonomialDictionary) -> np.ndarray:
    vector = as_vector(x, label="x")
    return explicit_feature_matrix(vector.reshape(-1, 1), dictionary)[:, 0]


def feature_residuals(Psi_selected: np.ndarray, Psi: np.ndarray) -> np.ndarray:
    """``||Psi(x) - P Psi(x)||^2`` for the projection onto ``span Psi_selected``."""

    coeffs, *_ = np.linalg.lstsq(Psi_selected, Psi, rcond=None)
    residual = Psi - Psi_selected @ coeffs
    return np.einsum("ij,ij->j", residual, residual)


__all__ = [
    "MonomialIndex",
    "MonomialDictionary",
    "enumerate_monomials",
    "raw_monomials",
    "explicit_feature_matrix",
    "explicit_features",
    "feature_residuals",
]
