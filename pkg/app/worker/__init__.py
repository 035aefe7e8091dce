"""Background worker components for kfsa grid runs."""

from .celery_app import celery_app
from .tasks import evaluate_grid_point

__all__ = ["celery_app", "evaluate_grid_point"]
