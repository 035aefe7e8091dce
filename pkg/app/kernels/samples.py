"""Sample and Gram matrix containers."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from app.errors import DimensionMismatchError, NonFiniteInputError


def _frozen_copy(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True, order="C")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SampleMatrix:
    """Column-major collection of ``m`` samples living in ``R^d``.

    Columns are samples. The array is copied and marked read-only on
    construction so instances can be shared between threads.
    """

    data: np.ndarray
    name: Optional[str] = None
    fingerprint: str = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        array = np.asarray(self.data, dtype=np.float64)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        if array.ndim != 2:
            raise DimensionMismatchError(f"Sample matrix must be 2-D (d x m), got shape {array.shape}.")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise DimensionMismatchError(f"Sample matrix needs d >= 1 and m >= 1, got shape {array.shape}.")
        if not np.all(np.isfinite(array)):
            raise NonFiniteInputError("Sample matrix contains NaN or Inf entries.")

        frozen = _frozen_copy(array)
        object.__setattr__(self, "data", frozen)
        digest = hashlib.blake2b(frozen.tobytes(), digest_size=8)
        digest.update(str(frozen.shape).encode())
        object.__setattr__(self, "fingerprint", self.name or f"samples:{digest.hexdigest()}")

    @classmethod
    def from_rows(cls, rows: np.ndarray, *, name: Optional[str] = None) -> "SampleMatrix":
        """Build from an ``m x d`` array (one sample per row)."""
        return cls(np.asarray(rows, dtype=np.float64).T, name=name)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[float]], *, name: Optional[str] = None) -> "SampleMatrix":
        stacked = np.column_stack([np.asarray(col, dtype=np.float64) for col in columns])
        return cls(stacked, name=name)

    @property
    def d(self) -> int:
        return int(self.data.shape[0])

    @property
    def m(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.d, self.m

    def column(self, index: int) -> np.ndarray:
        return self.data[:, index]

    def subset(self, indices: Sequence[int], *, name: Optional[str] = None) -> "SampleMatrix":
        idx = np.asarray(indices, dtype=np.intp)
        if idx.size == 0:
            raise DimensionMismatchError("Cannot build a sample matrix from an empty index list.")
        return SampleMatrix(self.data[:, idx], name=name)

    def hstack(self, other: "SampleMatrix", *, name: Optional[str] = None) -> "SampleMatrix":
        if other.d != self.d:
            raise DimensionMismatchError(f"Cannot join samples of dimension {self.d} and {other.d}.")
        return SampleMatrix(np.hstack([self.data, other.data]), name=name)

    def __len__(self) -> int:
        return self.m


@dataclass(frozen=True)
class GramMatrix:
    """Dense matrix of kernel evaluations between two sample sets."""

    values: np.ndarray
    left_set: str
    right_set: str

    def __post_init__(self) -> None:
        array = np.asarray(self.values, dtype=np.float64)
        if array.ndim != 2:
            raise DimensionMismatchError(f"Gram matrix must be 2-D, got shape {array.shape}.")
        if array is self.values and not array.flags.writeable:
            return
        object.__setattr__(self, "values", _frozen_copy(array))

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.values.shape[0]), int(self.values.shape[1])

    @property
    def is_self_gram(self) -> bool:
        return self.left_set == self.right_set

    def diagonal(self) -> np.ndarray:
        return np.diag(self.values).copy()

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        return self.values[np.ix_(np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp))]

    @property
    def nbytes(self) -> int:
        return int(self.values.nbytes)


def as_vector(x: np.ndarray | Sequence[float], *, label: str = "sample") -> np.ndarray:
    """Validate and return a finite 1-D float64 vector."""
    vector = np.asarray(x, dtype=np.float64)
    if vector.ndim == 2 and 1 in vector.shape:
        vector = vector.reshape(-1)
    if vector.ndim != 1:
        raise DimensionMismatchError(f"{label} must be a vector, got shape {vector.shape}.")
    if not np.all(np.isfinite(vector)):
        raise NonFiniteInputError(f"{label} contains NaN or Inf entries.")
    return vector


def ensure_samples(X: SampleMatrix | np.ndarray, *, name: Optional[str] = None) -> SampleMatrix:
    if isinstance(X, SampleMatrix):
        return X
    return SampleMatrix(np.asarray(X, dtype=np.float64), name=name)


__all__ = ["SampleMatrix", "GramMatrix", "as_vector", "ensure_samples"]
