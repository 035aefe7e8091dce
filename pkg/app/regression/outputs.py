"""Target matrices for regression and one-hot classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from app.errors import DimensionMismatchError, InvalidLabelError, NonFiniteInputError

Encoding = Literal["regression", "one_hot"]


@dataclass(frozen=True)
class OutputMatrix:
    """``d' x m`` targets; column ``j`` belongs to sample ``j``."""

    values: np.ndarray
    encoding: Encoding = "regression"
    num_classes: Optional[int] = None

    def __post_init__(self) -> None:
        array = np.array(self.values, dtype=np.float64, copy=True)
        if array.ndim == 1:
            array = array.reshape(1, -1)
        if array.ndim != 2:
            raise DimensionMismatchError(f"Output matrix must be 2-D (d' x m), got shape {array.shape}.")
        if not np.all(np.isfinite(array)):
            raise NonFiniteInputError("Output matrix contains NaN or Inf entries.")

        if self.encoding == "one_hot":
            classes = self.num_classes if self.num_classes is not None else array.shape[0]
            if array.shape[0] != classes:
                raise DimensionMismatchError(f"One-hot outputs need {classes} rows, got {array.shape[0]}.")
            ones = array == 1.0
            if not (np.all(ones | (array == 0.0)) and np.all(ones.sum(axis=0) == 1)):
                raise InvalidLabelError("One-hot outputs must have exactly one entry equal to 1 per column.")
            object.__setattr__(self, "num_classes", int(classes))
        elif self.encoding != "regression":
            raise ValueError(f"Unknown output encoding '{self.encoding}'.")

        array.setflags(write=False)
        object.__setattr__(self, "values", array)

    @property
    def d_out(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    @property
    def labels(self) -> np.ndarray:
        if self.encoding != "one_hot":
            raise ValueError("Only one-hot outputs carry class labels.")
        return np.argmax(self.values, axis=0).astype(np.intp)

    def subset(self, indices: Sequence[int]) -> "OutputMatrix":
        idx = np.asarray(indices, dtype=np.intp)
        return OutputMatrix(self.values[:, idx], encoding=self.encoding, num_classes=self.num_classes)


def one_hot(labels: Sequence[int] | np.ndarray, num_classes: int = 10) -> OutputMatrix:
    """Encode integer labels ``0..num_classes-1`` as one-hot columns."""

    values = np.asarray(labels)
    if values.ndim != 1:
        raise DimensionMismatchError(f"Labels must be a 1-D sequence, got shape {values.shape}.")
    if values.size and (not np.issubdtype(values.dtype, np.integer)):
        if not np.all(np.equal(np.mod(values, 1), 0)):
            raise InvalidLabelError("Labels must be integers.")
        values = values.astype(np.int64)
    bad = (values < 0) | (values >= num_classes)
    if np.any(bad):
        first = int(np.flatnonzero(bad)[0])
        raise InvalidLabelError(
            f"Label {values[first]} at position {first} is outside the class range [0, {num_classes - 1}]."
        )
    encoded = np.zeros((num_classes, values.size), dtype=np.float64)
    encoded[values, np.arange(values.size)] = 1.0
    return OutputMatrix(encoded, encoding="one_hot", num_classes=num_classes)


__all__ = ["Encoding", "OutputMatrix", "one_hot"]
