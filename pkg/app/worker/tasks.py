"""Celery task definitions for experiment grid points.

Each task rebuilds the validated :class:`ExperimentConfig` from its JSON
payload and evaluates exactly one grid point. Library errors are not
retried; they are deterministic for a given payload.
"""

from __future__ import annotations

from typing import Any, Dict, List

from celery.exceptions import MaxRetriesExceededError
from celery.utils.log import get_task_logger

from app.errors import KfsaError
from app.experiments.config import ExperimentConfig
from app.experiments.grid import evaluator_for
from app.experiments.tables import plain_rows

from .celery_app import celery_app

logger = get_task_logger(__name__)


def _is_transient(exc: BaseException) -> bool:
    """Connection hiccups (result backend, shared file systems) are worth retrying."""
    return isinstance(exc, (ConnectionError, TimeoutError))


def run_point(experiment: str, payload: Dict[str, Any], point: Dict[str, Any]) -> List[Dict[str, Any]]:
    config = ExperimentConfig.model_validate({**payload, "experiment": experiment, "dispatch": "local", "workers": 1})
    return plain_rows(evaluator_for(experiment)(config, point))


@celery_app.task(bind=True, name="kfsa.evaluate_grid_point", max_retries=3)
def evaluate_grid_point(
    self,
    experiment: str,
    payload: Dict[str, Any],
    point: Dict[str, Any],
) -> List[Dict[str, Any]]:
    """Evaluate one grid point and return its rows."""

    logger.info("Starting grid point", extra={"experiment": experiment, "point": point})
    try:
        rows = run_point(experiment, payload, point)
    except KfsaError:
        logger.exception("Grid point %s for %s failed", point, experiment)
        raise
    except MaxRetriesExceededError:
        logger.exception("Grid point %s for %s exceeded retry limit", point, experiment)
        raise
    except Exception as exc:
        if not _is_transient(exc):
            logger.exception("Grid point %s for %s crashed", point, experiment)
            raise
        retry_count = getattr(self.request, "retries", 0)
        delay = min(60, 5 * (2**retry_count))
        logger.warning(
            "Transient error for grid point %s (attempt %s), retrying in %ss: %s",
            point,
            retry_count + 1,
            delay,
            exc,
        )
        raise self.retry(exc=exc, countdown=delay)

    logger.info("Finished grid point %s for %s with %d rows", point, experiment, len(rows))
    return rows


__all__ = ["evaluate_grid_point", "run_point"]
