"""kFSA, fit and holdout evaluation for an arbitrary CSV table."""

from __future__ import annotations

from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from app.data import LabeledDataset, load_table
from app.errors import ConfigError
from app.regression import one_hot

from .common import ROW_ORDER, Row, holdout, normalize_split, selection_rows
from .config import ExperimentConfig
from .grid import run_grid
from .tables import sort_rows

TRAIN_FRACTION = 0.8


def _as_classes(dataset: LabeledDataset, num_classes: int) -> LabeledDataset:
    labels = dataset.Y.values[0]
    return LabeledDataset(
        X=dataset.X,
        Y=one_hot(labels, num_classes=num_classes),
        split=dataset.split,
        metadata=dict(dataset.metadata),
    )


@lru_cache(maxsize=4)
def _load(
    train_path: str,
    test_path: Optional[str],
    features: Tuple[str, ...],
    targets: Tuple[str, ...],
    task: str,
) -> Tuple[LabeledDataset, Optional[LabeledDataset]]:
    train = load_table(train_path, features, targets)
    test = load_table(test_path, features, targets, split="test") if test_path else None
    if task == "classification":
        pooled = train.Y.values[0] if test is None else np.concatenate([train.Y.values[0], test.Y.values[0]])
        num_classes = int(pooled.max()) + 1
        train = _as_classes(train, num_classes)
        test = _as_classes(test, num_classes) if test is not None else None
    return train, test


def prepare(config: ExperimentConfig):
    if not config.train:
        raise ConfigError("generic runs need --train <csv>.")
    dataset, test = _load(
        config.train,
        config.test,
        tuple(config.features or ()),
        tuple(config.targets or ()),
        config.task,
    )
    default_train = max(1, int(dataset.m * TRAIN_FRACTION))
    train, test = holdout(
        dataset, test, config, default_train=default_train, default_test=max(1, dataset.m - default_train)
    )
    normalized, normalizer = normalize_split(train, config.normalize)
    return normalized, test, normalizer


def evaluate_point(config: ExperimentConfig, params: Dict[str, Any]) -> List[Row]:
    train, test, normalizer = prepare(config)
    return selection_rows(config, float(params["kappa"]), train, test, normalizer=normalizer, task=config.task)


def run_generic(config: ExperimentConfig) -> Dict[str, List[Row]]:
    points = [{"kappa": kappa} for kappa in config.kappa]
    return {"generic": sort_rows(run_grid(config, points), ROW_ORDER)}


__all__ = ["evaluate_point", "run_generic", "prepare"]
