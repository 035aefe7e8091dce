"""Tests for grid fan-out."""

from __future__ import annotations

import pytest

from app.experiments import build_config
from app.experiments.fpu import grid_points
from app.experiments.grid import evaluator_for, run_grid
from app.experiments.tables import sort_rows


def _fpu_config(tmp_path, **overrides):
    params = {"experiment": "fpu", "d": "2,3", "m": "200", "out": str(tmp_path / "out")}
    params.update(overrides)
    return build_config(params)


def test_thread_pool_matches_sequential_rows(tmp_path) -> None:
    order = ("d", "method", "trial")
    sequential = _fpu_config(tmp_path)
    pooled = _fpu_config(tmp_path, workers="3")

    first = sort_rows(run_grid(sequential, grid_points(sequential)), order)
    second = sort_rows(run_grid(pooled, grid_points(pooled)), order)

    assert first == second


def test_unknown_experiment_has_no_evaluator() -> None:
    with pytest.raises(ValueError):
        evaluator_for("weather")


def test_celery_dispatch_queues_one_task_per_point(tmp_path, mocker) -> None:
    config = _fpu_config(tmp_path, dispatch="celery")
    result = mocker.Mock()
    result.get.return_value = [{"d": 2, "method": "kfsa"}]
    delay = mocker.patch("app.worker.tasks.evaluate_grid_point.delay", return_value=result)

    rows = run_grid(config, grid_points(config))

    assert delay.call_count == 2
    experiment, payload, point = delay.call_args_list[1].args
    assert experiment == "fpu"
    assert payload["dispatch"] == "celery"
    assert point == {"d": 3, "trial": 0}
    assert rows == [{"d": 2, "method": "kfsa"}] * 2
