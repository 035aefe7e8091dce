"""Runs against the real MNIST and CalCOFI files when they are present under ``KFSA_DATA_DIR``."""

from __future__ import annotations

from pathlib import Path

import pytest

from app.config import CONFIG
from app.errors import DataError
from app.experiments import build_config, run_calcofi, run_mnist


def _mnist_dir() -> Path:
    root = Path(CONFIG.data_dir) / "mnist"
    try:
        from app.data import mnist_paths

        mnist_paths(root, "train")
        mnist_paths(root, "test")
    except DataError:
        pytest.skip(f"MNIST IDX files not found under {root}")
    return root


def _calcofi_csv() -> Path:
    path = Path(CONFIG.data_dir) / "calcofi" / "calcofi.csv"
    if not path.exists():
        pytest.skip(f"CalCOFI CSV not found at {path}")
    return path


@pytest.mark.slow
def test_mnist_desk_scale_classification(tmp_path) -> None:
    config = build_config(
        {
            "experiment": "mnist",
            "train": str(_mnist_dir()),
            "subsample": 2000,
            "test_subsample": 1000,
            "kappa": "0.5",
            "epsilon": "0.01",
            "out": str(tmp_path),
        }
    )

    (row,) = run_mnist(config)["mnist"]

    assert row["classification_rate"] >= 0.85
    assert row["selected"] < 2000


@pytest.mark.slow
def test_calcofi_grid_stays_in_reported_range(tmp_path) -> None:
    config = build_config(
        {
            "experiment": "calcofi",
            "train": str(_calcofi_csv()),
            "epsilon": "1e-6,1e-10",
            "out": str(tmp_path),
        }
    )

    rows = run_calcofi(config)["calcofi"]

    assert all(0.0125 <= row["mse"] <= 0.0314 for row in rows)
    assert all(row["selected"] < 7000 for row in rows)
