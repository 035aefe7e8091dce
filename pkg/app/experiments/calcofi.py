"""Dissolved-oxygen regression on CalCOFI CTD measurements."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from app.config import CONFIG
from app.data import LabeledDataset, load_calcofi_csv

from .common import ROW_ORDER, Row, holdout, normalize_split, selection_rows
from .config import ExperimentConfig
from .grid import run_grid
from .tables import sort_rows

TRAIN_SIZE = 25000
TEST_SIZE = 5000


def _default_csv() -> str:
    return str(Path(CONFIG.data_dir) / "calcofi" / "calcofi.csv")


@lru_cache(maxsize=4)
def _load(train_path: str, test_path: Optional[str]) -> Tuple[LabeledDataset, Optional[LabeledDataset]]:
    train = load_calcofi_csv(train_path)
    test = load_calcofi_csv(test_path, split="test") if test_path else None
    return train, test


def prepare(config: ExperimentConfig):
    """Training split (normalised), raw test split and the fitted normaliser."""

    dataset, test = _load(config.train or _default_csv(), config.test)
    train, test = holdout(dataset, test, config, default_train=TRAIN_SIZE, default_test=TEST_SIZE)
    normalized, normalizer = normalize_split(train, True)
    return normalized, test, normalizer


def evaluate_point(config: ExperimentConfig, params: Dict[str, Any]) -> List[Row]:
    train, test, normalizer = prepare(config)
    rows = selection_rows(config, float(params["kappa"]), train, test, normalizer=normalizer)
    for row in rows:
        row["dropped_rows"] = int(train.metadata.get("dropped_rows", 0))
    return rows


def run_calcofi(config: ExperimentConfig) -> Dict[str, List[Row]]:
    points = [{"kappa": kappa} for kappa in config.kappa]
    return {"calcofi": sort_rows(run_grid(config, points), ROW_ORDER)}


__all__ = ["evaluate_point", "run_calcofi", "prepare"]
