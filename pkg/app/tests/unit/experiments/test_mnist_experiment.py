"""Tests for the per-class MNIST experiment on synthetic IDX files."""

from __future__ import annotations

import numpy as np
import pytest

from app.data import write_idx
from app.errors import DataError
from app.experiments import build_config, run_experiment, run_mnist
from app.experiments.mnist import _load_split, best_per_kappa, prepare


def _digits(rng: np.random.Generator, per_class: int):
    """Each digit lights up its own horizontal band plus noise."""
    labels = np.repeat(np.arange(10, dtype=np.uint8), per_class)
    images = rng.integers(0, 40, size=(labels.size, 28, 28), dtype=np.uint8)
    for index, digit in enumerate(labels):
        row = 2 + 2 * int(digit)
        images[index, row : row + 3, 4:24] = 255
    return images, labels


@pytest.fixture
def mnist_dir(tmp_path):
    rng = np.random.Generator(np.random.PCG64(21))
    root = tmp_path / "mnist"
    train_images, train_labels = _digits(rng, 12)
    test_images, test_labels = _digits(rng, 4)
    write_idx(root / "train-images-idx3-ubyte.gz", train_images)
    write_idx(root / "train-labels-idx1-ubyte.gz", train_labels)
    write_idx(root / "t10k-images-idx3-ubyte", test_images)
    write_idx(root / "t10k-labels-idx1-ubyte", test_labels)
    return root


def _config(root, tmp_path, **overrides):
    params = {
        "experiment": "mnist",
        "train": str(root),
        "kappa": "0.5",
        "epsilon": "1.0,0.1",
        "out": str(tmp_path / "out"),
    }
    params.update(overrides)
    return build_config(params)


def test_loosest_threshold_keeps_one_sample_per_digit(mnist_dir, tmp_path) -> None:
    rows = run_mnist(_config(mnist_dir, tmp_path))["mnist"]

    loose = next(row for row in rows if row["epsilon"] == 1.0)
    assert [loose[f"count_{digit}"] for digit in range(10)] == [1] * 10
    assert loose["selected"] == 10
    tight = next(row for row in rows if row["epsilon"] == 0.1)
    assert tight["selected"] >= 10
    assert 0.0 <= tight["classification_rate"] <= 1.0
    assert loose["train_m"] == 120 and loose["test_m"] == 40


def test_full_fit_and_summary(mnist_dir, tmp_path) -> None:
    tables = run_mnist(_config(mnist_dir, tmp_path, include_full=True))

    full = next(row for row in tables["mnist"] if row["method"] == "full")
    assert full["epsilon"] == 0.0
    assert full["selected"] == 120
    assert [full[f"count_{digit}"] for digit in range(10)] == [12] * 10
    summary = tables["mnist_summary"]
    assert len(summary) == 1
    assert summary[0]["best_epsilon"] in (1.0, 0.1)
    assert summary[0]["full_classification_rate"] == full["classification_rate"]


def test_stratified_subsample_limits_training_set(mnist_dir, tmp_path) -> None:
    rows = run_mnist(_config(mnist_dir, tmp_path, subsample="50", epsilon="1.0"))["mnist"]

    assert rows[0]["train_m"] == 50
    assert rows[0]["selected"] == 10


def test_run_writes_both_tables(mnist_dir, tmp_path) -> None:
    paths = run_experiment(_config(mnist_dir, tmp_path, format="json"))

    assert sorted(path.name for path in paths) == ["mnist.json", "mnist.meta.json", "mnist_summary.json"]


def test_missing_directory_is_a_data_error(tmp_path) -> None:
    with pytest.raises(DataError):
        run_mnist(_config(tmp_path / "nowhere", tmp_path))


def test_best_threshold_prefers_larger_epsilon_on_ties() -> None:
    rows = [
        {"kappa": 0.3, "method": "kfsa", "epsilon": 0.1, "gamma": 1e-10, "seed": 0, "selected": 50, "classification_rate": 0.9},
        {"kappa": 0.3, "method": "kfsa", "epsilon": 0.5, "gamma": 1e-10, "seed": 0, "selected": 20, "classification_rate": 0.9},
        {"kappa": 0.3, "method": "kfsa", "epsilon": 1.0, "gamma": 1e-10, "seed": 0, "selected": 10, "classification_rate": 0.7},
    ]

    (best,) = best_per_kappa(rows)

    assert best["best_epsilon"] == 0.5
    assert best["full_classification_rate"] is None


def test_rows_share_the_tabular_schema(mnist_dir, tmp_path) -> None:
    rows = run_mnist(_config(mnist_dir, tmp_path, include_full=True))["mnist"]

    for row in rows:
        assert {"truncated", "final_max_error", "selected", "classification_rate"} <= set(row)
    reduced = [row for row in rows if row["method"] == "kfsa"]
    assert all(row["truncated"] is False for row in reduced)
    assert all(row["final_max_error"] < row["epsilon"] for row in reduced)
    assert "residual" not in rows[0]


def test_budget_matched_nystrom_mirrors_per_class_counts(mnist_dir, tmp_path) -> None:
    rows = run_mnist(_config(mnist_dir, tmp_path, nystrom="uniform", budget_match=True))["mnist"]

    for eps in (1.0, 0.1):
        kfsa = next(row for row in rows if row["method"] == "kfsa" and row["epsilon"] == eps)
        sampled = next(row for row in rows if row["method"] == "nystrom-uniform" and row["epsilon"] == eps)
        counts = [f"count_{digit}" for digit in range(10)]
        assert [sampled[key] for key in counts] == [kfsa[key] for key in counts]
        assert sampled["residual"] >= 0.0 and kfsa["residual"] >= 0.0
    best = best_per_kappa(rows)
    assert len(best) == 1


def test_fixed_budget_nystrom_applies_per_class(mnist_dir, tmp_path) -> None:
    rows = run_mnist(_config(mnist_dir, tmp_path, nystrom="leverage", budget="3"))["mnist"]

    sampled = next(row for row in rows if row["method"] == "nystrom-leverage")
    assert sampled["epsilon"] is None
    assert [sampled[f"count_{digit}"] for digit in range(10)] == [3] * 10
    assert sampled["selected"] == 30


def test_cached_splits_are_reused_without_reading_idx(mnist_dir, tmp_path, mocker) -> None:
    config = _config(mnist_dir, tmp_path, cache=True)
    train, test = prepare(config)
    assert len(list((tmp_path / "cache").glob("mnist_*.npz"))) == 2

    _load_split.cache_clear()
    reader = mocker.patch("app.experiments.mnist.load_mnist_idx", side_effect=AssertionError("IDX read"))
    cached_train, cached_test = prepare(config)

    reader.assert_not_called()
    assert np.array_equal(cached_train.X.data, train.X.data)
    assert np.array_equal(cached_test.labels, test.labels)


def test_saved_models_cover_every_threshold(mnist_dir, tmp_path) -> None:
    run_mnist(_config(mnist_dir, tmp_path, save_model=True))

    names = sorted(path.name for path in (tmp_path / "out" / "models").glob("*.yaml"))
    assert names == ["mnist_kappa0.5_kfsa_eps0.1.yaml", "mnist_kappa0.5_kfsa_eps1.yaml"]
