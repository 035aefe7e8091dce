"""Governing-equation coefficients in the monomial basis."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.errors import ConfigError, DimensionMismatchError
from app.kernels import PolynomialKernel, SampleMatrix
from app.regression.models import ReducedModel

from .monomials import MonomialDictionary, explicit_feature_matrix, raw_monomials

Polynomial = Dict[Tuple[int, ...], float]


@dataclass(frozen=True)
class CoefficientMatrix:
    """``d' x n`` coefficients multiplying raw monomials in dictionary order."""

    values: np.ndarray
    dictionary: MonomialDictionary
    row_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2 or values.shape[1] != len(self.dictionary):
            raise DimensionMismatchError(
                f"Coefficient matrix needs {len(self.dictionary)} columns, got shape {values.shape}."
            )
        if self.row_names is not None and len(self.row_names) != values.shape[0]:
            raise DimensionMismatchError("row_names must have one entry per output.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def coefficient(self, row: int, powers: Sequence[int]) -> float:
        return float(self.values[row, self.dictionary.position(powers)])

    def by_multi_index(self) -> Dict[Tuple[int, ...], np.ndarray]:
        return {term.powers: self.values[:, i] for i, term in enumerate(self.dictionary)}

    def evaluate(self, X: SampleMatrix | np.ndarray) -> np.ndarray:
        """Right-hand side values ``Theta' Psi'(X)`` for every sample."""
        return self.values @ raw_monomials(X, self.dictionary)

    def to_frame(self) -> pd.DataFrame:
        names = list(self.row_names) if self.row_names else [f"y{i + 1}" for i in range(self.values.shape[0])]
        frame = pd.DataFrame(self.values, columns=self.dictionary.names)
        frame.insert(0, "output", names)
        return frame

    def to_csv(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(target, index=False, float_format="%.17g")
        return target


def _variable(index: int, d: int) -> Polynomial:
    # Fixed chain ends contribute nothing.
    if index < 1 or index > d:
        return {}
    powers = [0] * d
    powers[index - 1] = 1
    return {tuple(powers): 1.0}


def _add(*polys: Tuple[float, Polynomial]) -> Polynomial:
    out: Polynomial = defaultdict(float)
    for scale, poly in polys:
        for powers, value in poly.items():
            out[powers] += scale * value
    return {powers: value for powers, value in out.items() if value != 0.0}


def _mul(a: Polynomial, b: Polynomial) -> Polynomial:
    out: Polynomial = defaultdict(float)
    for pa, va in a.items():
        for pb, vb in b.items():
            out[tuple(x + y for x, y in zip(pa, pb))] += va * vb
    return {powers: value for powers, value in out.items() if value != 0.0}


def fpu_polynomials(d: int, beta: float) -> List[Polynomial]:
    """Right-hand sides of the FPU chain as sparse polynomials."""

    rows: List[Polynomial] = []
    for i in range(1, d + 1):
        left, here, right = _variable(i - 1, d), _variable(i, d), _variable(i + 1, d)
        linear = _add((1.0, right), (-2.0, here), (1.0, left))
        forward = _add((1.0, right), (-1.0, here))
        backward = _add((1.0, here), (-1.0, left))
        cubic = _add((1.0, _mul(_mul(forward, forward), forward)), (-1.0, _mul(_mul(backward, backward), backward)))
        rows.append(_add((1.0, linear), (float(beta), cubic)))
    return rows


def exact_fpu_coefficients(d: int, beta: float, dictionary: MonomialDictionary) -> CoefficientMatrix:
    if d < 1:
        raise ConfigError(f"FPU chain needs d >= 1, got {d}.")
    if dictionary.d != d:
        raise DimensionMismatchError(f"Dictionary is for d={dictionary.d}, chain has d={d}.")
    if dictionary.q < 3:
        raise ConfigError("FPU dynamics are cubic; the dictionary needs degree q >= 3.")

    values = np.zeros((d, len(dictionary)), dtype=np.float64)
    for row, poly in enumerate(fpu_polynomials(d, beta)):
        for powers, value in poly.items():
            values[row, dictionary.position(powers)] = value
    return CoefficientMatrix(values, dictionary, row_names=tuple(f"x{i}''" for i in range(1, d + 1)))


def recover_coefficients(model: ReducedModel, dictionary: MonomialDictionary) -> CoefficientMatrix:
    """``Theta' = theta Psi_selected^T D`` with ``D = diag(sqrt(a_p))``."""

    kernel = model.kernel
    if not isinstance(kernel, PolynomialKernel):
        raise ConfigError(f"Coefficient recovery needs a polynomial kernel, got {kernel.describe()}.")
    if kernel.degree != dictionary.q or float(kernel.kappa) != float(dictionary.kappa):
        raise ConfigError(
            f"Kernel {kernel.describe()} does not match the dictionary (kappa={dictionary.kappa}, q={dictionary.q})."
        )
    if model.normalization is not None:
        raise ConfigError("Coefficient recovery is only defined for models fit on raw (unnormalised) inputs.")

    Psi = explicit_feature_matrix(model.selected_X, dictionary)
    scale = np.sqrt(dictionary.prefactors)
    return CoefficientMatrix(model.theta @ (Psi.T * scale[None, :]), dictionary)


def relative_coefficient_error(recovered: CoefficientMatrix, exact: CoefficientMatrix) -> float:
    """``||A - B||_F / ||B||_F`` with columns matched by multi-index."""

    left, right = recovered.by_multi_index(), exact.by_multi_index()
    if set(left) != set(right):
        raise DimensionMismatchError("Coefficient matrices use different monomial dictionaries.")
    diff = np.stack([left[key] - right[key] for key in right])
    reference = np.stack(list(right.values()))
    norm = float(np.linalg.norm(reference))
    if norm == 0.0:
        return float(np.linalg.norm(diff))
    return float(np.linalg.norm(diff) / norm)


__all__ = [
    "CoefficientMatrix",
    "fpu_polynomials",
    "exact_fpu_coefficients",
    "recover_coefficients",
    "relative_coefficient_error",
]
