"""Tests for the FPU equation-recovery experiment."""

from __future__ import annotations

import pandas as pd

from app.data import generate_fpu
from app.experiments import build_config, run_experiment, run_fpu
from app.experiments.fpu import evaluate_point, expected_count, grid_points
from app.regression import load_model, predict_batch


def _config(tmp_path, **overrides):
    params = {"experiment": "fpu", "d": "2,3", "m": "300", "trials": "2", "out": str(tmp_path / "out")}
    params.update(overrides)
    return build_config(params)


def test_expected_count_is_binomial() -> None:
    assert [expected_count(d, 3) for d in range(2, 11)] == [10, 20, 35, 56, 84, 120, 165, 220, 286]


def test_grid_points_cover_every_trial(tmp_path) -> None:
    assert grid_points(_config(tmp_path)) == [
        {"d": 2, "trial": 0},
        {"d": 2, "trial": 1},
        {"d": 3, "trial": 0},
        {"d": 3, "trial": 1},
    ]


def test_point_rows_report_reduced_and_full_fits(tmp_path) -> None:
    rows = evaluate_point(_config(tmp_path), {"d": 2, "trial": 1})

    methods = {row["method"]: row for row in rows}
    assert set(methods) == {"kfsa", "full"}
    assert methods["kfsa"]["selected"] == 10 == methods["kfsa"]["expected"]
    assert methods["kfsa"]["relative_error"] < 1e-5
    assert methods["kfsa"]["seed"] == 1
    assert methods["full"]["selected"] == 300
    assert methods["full"]["epsilon"] == 0.0


def test_run_fpu_summarises_trials(tmp_path) -> None:
    tables = run_fpu(_config(tmp_path))

    summary = pd.DataFrame(tables["fpu"])
    trials = pd.DataFrame(tables["fpu_trials"])
    assert len(trials) == 2 * 2 * 2
    reduced = summary[summary["method"] == "kfsa"].set_index("d")
    assert reduced.loc[2, "selected_min"] == reduced.loc[2, "selected_max"] == 10
    assert reduced.loc[3, "selected_max"] == 20
    assert (reduced["p5_error"] <= reduced["median_error"]).all()
    assert (reduced["median_error"] <= reduced["p95_error"]).all()
    assert (summary["trials"] == 2).all()


def test_run_experiment_writes_tables_metadata_and_coefficients(tmp_path) -> None:
    config = _config(tmp_path, d="2", trials="1", export_coefficients=True)

    paths = run_experiment(config)

    names = sorted(path.name for path in paths)
    assert names == ["fpu.csv", "fpu.meta.json", "fpu_trials.csv"]
    exported = sorted((tmp_path / "out" / "coefficients").glob("*.csv"))
    assert len(exported) == 2
    frame = pd.read_csv(exported[0])
    assert frame.columns[0] == "output"
    assert "x1^3" in frame.columns


def test_reruns_are_byte_identical(tmp_path) -> None:
    first = run_experiment(_config(tmp_path, out=str(tmp_path / "a"), d="2", trials="1"))
    second = run_experiment(_config(tmp_path, out=str(tmp_path / "b"), d="2", trials="1"))

    for left, right in zip(first, second):
        if left.suffix == ".csv":
            assert left.read_bytes() == right.read_bytes()


def test_chunked_selection_still_finds_feature_dimension(tmp_path) -> None:
    rows = evaluate_point(_config(tmp_path, chunk_size="100"), {"d": 2, "trial": 0})

    reduced = next(row for row in rows if row["method"] == "kfsa")
    assert reduced["selected"] == 10
    assert reduced["relative_error"] < 1e-5


def test_saved_models_reload_and_predict(tmp_path) -> None:
    config = _config(tmp_path, save_model=True)

    evaluate_point(config, {"d": 2, "trial": 0})

    models = tmp_path / "out" / "models"
    assert sorted(path.name for path in models.glob("*.yaml")) == [
        "fpu_d2_trial0_kappa1_full_eps0.yaml",
        "fpu_d2_trial0_kappa1_kfsa_eps1e-10.yaml",
    ]
    reduced = load_model(models / "fpu_d2_trial0_kappa1_kfsa_eps1e-10.yaml")
    dataset = generate_fpu(2, 300, config.beta, seed=0)
    assert reduced.size == 10
    assert reduced.kernel.kind == "polynomial"
    assert ((predict_batch(reduced, dataset.X) - dataset.Y.values) ** 2).mean() < 1e-10


def test_models_are_not_written_by_default(tmp_path) -> None:
    evaluate_point(_config(tmp_path), {"d": 2, "trial": 0})

    assert not (tmp_path / "out" / "models").exists()
