"""Labelled datasets and sampling helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.errors import ConfigError, DimensionMismatchError
from app.kernels import SampleMatrix
from app.regression.outputs import OutputMatrix

Split = Literal["train", "test"]


@dataclass(frozen=True)
class LabeledDataset:
    """Samples ``X`` (d x m) paired with outputs ``Y`` (d' x m)."""

    X: SampleMatrix
    Y: OutputMatrix
    split: Split = "train"
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.X.m != self.Y.m:
            raise DimensionMismatchError(f"X has {self.X.m} samples but Y has {self.Y.m} columns.")
        if self.split not in ("train", "test"):
            raise ValueError(f"split must be 'train' or 'test', got {self.split!r}.")

    @property
    def m(self) -> int:
        return self.X.m

    @property
    def labels(self) -> np.ndarray:
        return self.Y.labels

    def subset(self, indices: Sequence[int], *, split: Optional[Split] = None, **metadata: Any) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.intp)
        return LabeledDataset(
            X=self.X.subset(idx),
            Y=self.Y.subset(idx),
            split=split or self.split,
            metadata={**self.metadata, **metadata},
        )

    def with_samples(self, X: SampleMatrix) -> "LabeledDataset":
        return LabeledDataset(X=X, Y=self.Y, split=self.split, metadata=dict(self.metadata))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def random_split(
    dataset: LabeledDataset,
    n_train: int,
    n_test: int,
    seed: int = 0,
) -> Tuple[LabeledDataset, LabeledDataset]:
    """Disjoint seeded train/test extraction."""

    if n_train < 1 or n_test < 1:
        raise ConfigError("Train and test sizes must both be >= 1.")
    if n_train + n_test > dataset.m:
        raise ConfigError(f"Cannot draw {n_train} + {n_test} samples from a dataset of {dataset.m}.")
    order = _rng(seed).permutation(dataset.m)
    train_idx = np.sort(order[:n_train])
    test_idx = np.sort(order[n_train : n_train + n_test])
    return (
        dataset.subset(train_idx, split="train", split_seed=int(seed)),
        dataset.subset(test_idx, split="test", split_seed=int(seed)),
    )


def stratified_subsample(dataset: LabeledDataset, n: int, seed: int = 0) -> LabeledDataset:
    """Class-balanced seeded subsample of ``n`` one-hot labelled samples.

    Each class gets ``n // C`` samples and the first ``n % C`` classes one
    extra; the result keeps the original sample order.
    """

    labels = dataset.labels
    classes = int(dataset.Y.num_classes or labels.max() + 1)
    if n < 1 or n > dataset.m:
        raise ConfigError(f"Subsample size must lie in [1, {dataset.m}], got {n}.")

    rng = _rng(seed)
    base, extra = divmod(int(n), classes)
    chosen = []
    for label in range(classes):
        want = base + (1 if label < extra else 0)
        pool = np.flatnonzero(labels == label)
        if want > pool.size:
            raise ConfigError(f"Class {label} has only {pool.size} samples; {want} requested.")
        if want:
            chosen.append(rng.choice(pool, size=want, replace=False))
    indices = np.sort(np.concatenate(chosen)) if chosen else np.empty(0, dtype=np.intp)
    return dataset.subset(indices, subsample=int(n), subsample_seed=int(seed), stratified=True)


def write_dataset_csv(
    dataset: LabeledDataset,
    path: str | Path,
    *,
    feature_names: Optional[Sequence[str]] = None,
    target_names: Optional[Sequence[str]] = None,
) -> Path:
    """One row per sample: feature columns followed by target columns."""

    features = list(feature_names or [f"x{i + 1}" for i in range(dataset.X.d)])
    targets = list(target_names or [f"y{i + 1}" for i in range(dataset.Y.d_out)])
    if len(features) != dataset.X.d or len(targets) != dataset.Y.d_out:
        raise DimensionMismatchError("Column names do not match the dataset dimensions.")
    frame = pd.DataFrame(
        np.hstack([dataset.X.data.T, dataset.Y.values.T]),
        columns=features + targets,
    )
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, float_format="%.17g")
    return target


__all__ = ["Split", "LabeledDataset", "random_split", "stratified_subsample", "write_dataset_csv"]
