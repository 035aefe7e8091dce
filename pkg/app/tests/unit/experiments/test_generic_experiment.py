"""Tests for the CSV-driven generic experiment."""

from __future__ import annotations

import numpy as np
import pandas as pd
import pytest

from app.data import write_dataset_csv
from app.errors import ConfigError
from app.experiments import build_config, run_experiment, run_generic
from app.regression import load_model


@pytest.fixture
def fpu_csv(tmp_path, fpu_small):
    return write_dataset_csv(fpu_small, tmp_path / "chain.csv")


def _config(train, tmp_path, **overrides):
    params = {
        "experiment": "generic",
        "train": str(train),
        "features": "x1,x2,x3",
        "targets": "y1,y2,y3",
        "kappa": "1",
        "epsilon": "1.0,1e-4",
        "out": str(tmp_path / "out"),
    }
    params.update(overrides)
    return build_config(params)


def test_regression_rows_per_threshold(fpu_csv, tmp_path) -> None:
    rows = run_generic(_config(fpu_csv, tmp_path))["generic"]

    by_eps = {row["epsilon"]: row for row in rows}
    assert set(by_eps) == {1.0, 1e-4}
    assert by_eps[1.0]["selected"] == 1
    assert by_eps[1e-4]["selected"] > 1
    assert by_eps[1e-4]["mse"] < by_eps[1.0]["mse"]
    assert by_eps[1e-4]["train_m"] == 240
    assert by_eps[1e-4]["test_m"] == 50
    assert all(row["kernel"] == "gaussian" for row in rows)


def test_missing_training_file_is_a_config_error(tmp_path) -> None:
    config = build_config({"experiment": "generic", "features": "a", "targets": "b"})

    with pytest.raises(ConfigError):
        run_generic(config)


def test_reruns_write_identical_tables(fpu_csv, tmp_path) -> None:
    first = run_experiment(_config(fpu_csv, tmp_path, out=str(tmp_path / "a")))[0]
    second = run_experiment(_config(fpu_csv, tmp_path, out=str(tmp_path / "b")))[0]

    assert first.read_bytes() == second.read_bytes()


def test_classification_task_reports_rates(tmp_path) -> None:
    rng = np.random.Generator(np.random.PCG64(3))
    centers = np.array([[0.0, 0.0], [3.0, 3.0], [0.0, 3.0]])
    labels = np.repeat(np.arange(3), 40)
    points = centers[labels] + 0.2 * rng.standard_normal((labels.size, 2))
    path = tmp_path / "blobs.csv"
    pd.DataFrame({"u": points[:, 0], "v": points[:, 1], "label": labels}).to_csv(path, index=False)

    config = build_config(
        {
            "experiment": "generic",
            "train": str(path),
            "features": "u,v",
            "targets": "label",
            "task": "classification",
            "kappa": "1",
            "epsilon": "1e-3",
            "out": str(tmp_path / "out"),
        }
    )
    rows = run_generic(config)["generic"]

    assert len(rows) == 1
    assert rows[0]["classification_rate"] > 0.9
    assert "mse" not in rows[0]


@pytest.mark.parametrize("kind", ["cosine", "composite"])
def test_normalized_kernels_cover_every_feature(fpu_csv, tmp_path, kind: str) -> None:
    rows = run_generic(_config(fpu_csv, tmp_path, kernel=kind))["generic"]

    by_eps = {row["epsilon"]: row for row in rows}
    assert all(row["kernel"] == kind for row in rows)
    assert by_eps[1.0]["selected"] == 1
    assert by_eps[1e-4]["selected"] >= by_eps[1.0]["selected"]


def test_saved_models_match_table_rows(fpu_csv, tmp_path) -> None:
    rows = run_generic(_config(fpu_csv, tmp_path, save_model=True, nystrom="uniform", budget="5"))["generic"]

    models = tmp_path / "out" / "models"
    assert sorted(path.name for path in models.glob("*.yaml")) == [
        "generic_kappa1_kfsa_eps0.0001.yaml",
        "generic_kappa1_kfsa_eps1.yaml",
        "generic_kappa1_nystrom-uniform_budget.yaml",
    ]
    tight = next(row for row in rows if row["epsilon"] == 1e-4)
    assert load_model(models / "generic_kappa1_kfsa_eps0.0001.yaml").size == tight["selected"]
    assert load_model(models / "generic_kappa1_nystrom-uniform_budget.yaml").size == 5


def test_chunked_rows_respect_threshold_metadata(fpu_csv, tmp_path) -> None:
    chunked = run_generic(_config(fpu_csv, tmp_path, epsilon="1e-4", chunk_size="80"))["generic"][0]

    assert chunked["final_max_error"] < 1e-4
    assert chunked["truncated"] is False
    assert chunked["selected"] > 1
