"""Fan-out of independent grid points.

Points run in-process (optionally on a thread pool) or as Celery tasks.
Whatever the schedule, callers sort the returned rows by parameter
tuple before writing, so output does not depend on completion order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Sequence

from app.config import CONFIG
from app.logger import log

from .config import ExperimentConfig

logger = logging.getLogger(__name__)

Row = Dict[str, Any]
Evaluator = Callable[[ExperimentConfig, Dict[str, Any]], List[Row]]


def evaluator_for(experiment: str) -> Evaluator:
    from . import calcofi, fpu, generic, mnist

    evaluators: Dict[str, Evaluator] = {
        "mnist": mnist.evaluate_point,
        "fpu": fpu.evaluate_point,
        "calcofi": calcofi.evaluate_point,
        "generic": generic.evaluate_point,
    }
    try:
        return evaluators[experiment]
    except KeyError as exc:
        raise ValueError(f"No evaluator registered for experiment '{experiment}'.") from exc


def _evaluate_logged(config: ExperimentConfig, evaluate: Evaluator, point: Dict[str, Any]) -> List[Row]:
    if not CONFIG.quiet_progress:
        log(f"[experiment:{config.experiment}] evaluating grid point", **point)
    return evaluate(config, point)


def _run_celery(config: ExperimentConfig, points: Sequence[Dict[str, Any]]) -> List[Row]:
    from app.worker.tasks import evaluate_grid_point

    payload = config.to_payload()
    pending = [evaluate_grid_point.delay(config.experiment, payload, dict(point)) for point in points]
    log(f"[experiment:{config.experiment}] dispatched {len(pending)} grid points to celery")
    rows: List[Row] = []
    for result in pending:
        rows.extend(result.get(timeout=CONFIG.celery_task_timeout))
    return rows


def run_grid(config: ExperimentConfig, points: Sequence[Dict[str, Any]]) -> List[Row]:
    """Evaluate every point and return the concatenated rows (unordered)."""

    if config.dispatch == "celery":
        return _run_celery(config, points)

    evaluate = evaluator_for(config.experiment)
    if config.workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            batches = list(pool.map(lambda point: _evaluate_logged(config, evaluate, point), points))
    else:
        batches = [_evaluate_logged(config, evaluate, point) for point in points]
    return [row for batch in batches for row in batch]


__all__ = ["Row", "Evaluator", "evaluator_for", "run_grid"]
