"""Celery application instance used to fan experiment grid points out to workers."""

from __future__ import annotations

import os

from celery import Celery

from app.config import CONFIG

celery_app = Celery(
    "kfsa",
    broker=CONFIG.celery_broker_url,
    backend=CONFIG.celery_result_backend,
    include=["app.worker.tasks"],
)

celery_app.conf.update(
    broker_connection_retry_on_startup=True,
    task_track_started=True,
    task_serializer="json",
    result_serializer="json",
    accept_content=["json"],
    worker_prefetch_multiplier=int(os.getenv("CELERY_WORKER_PREFETCH", "1")),
    task_default_queue=CONFIG.celery_default_queue,
    timezone=os.getenv("CELERY_TIMEZONE", "UTC"),
    enable_utc=True,
)


__all__ = ["celery_app"]
