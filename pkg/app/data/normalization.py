"""Per-dimension min-max normalisation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Mapping

import numpy as np

from app.errors import DimensionMismatchError
from app.kernels import SampleMatrix, ensure_samples


@dataclass(frozen=True)
class Normalizer:
    """Training-set extrema ``l`` and ``u``; constant dimensions map to 0."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.array(self.lower, dtype=np.float64).reshape(-1)
        upper = np.array(self.upper, dtype=np.float64).reshape(-1)
        if lower.shape != upper.shape:
            raise DimensionMismatchError(f"Normalizer bounds differ in length: {lower.size} vs {upper.size}.")
        if np.any(upper < lower):
            raise ValueError("Normalizer upper bounds must be >= lower bounds.")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def d(self) -> int:
        return int(self.lower.size)

    def transform(self, X: SampleMatrix | np.ndarray) -> SampleMatrix:
        samples = ensure_samples(X)
        if samples.d != self.d:
            raise DimensionMismatchError(f"Normalizer fit on d={self.d}, got samples with d={samples.d}.")
        span = self.upper - self.lower
        constant = span == 0
        scaled = (samples.data - self.lower[:, None]) / np.where(constant, 1.0, span)[:, None]
        scaled[constant, :] = 0.0
        return SampleMatrix(scaled)

    def to_dict(self) -> Dict[str, Any]:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "Normalizer":
        return cls(np.asarray(payload["lower"]), np.asarray(payload["upper"]))


def fit_normalizer(X: SampleMatrix | np.ndarray) -> Normalizer:
    samples = ensure_samples(X)
    return Normalizer(samples.data.min(axis=1), samples.data.max(axis=1))


def apply_normalizer(normalizer: Normalizer, X: SampleMatrix | np.ndarray) -> SampleMatrix:
    """Rescale with stored constants; values outside ``[0, 1]`` are kept."""
    return normalizer.transform(X)


__all__ = ["Normalizer", "fit_normalizer", "apply_normalizer"]
