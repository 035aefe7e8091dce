"""Lightweight logging helper shared by the library and the CLI."""

from __future__ import annotations

import logging
from typing import Any

_LOGGER = logging.getLogger("kfsa")


def _coerce(parts: tuple[object, ...]) -> str:
    rendered = " ".join(str(part) for part in parts if part is not None)
    return rendered.strip()


def configure_logging(level: str | int | None = None) -> None:
    """Install a basic handler once and apply ``KFSA_LOG_LEVEL``."""

    if level is None:
        from app.config import CONFIG

        level = getattr(CONFIG, "log_level", "INFO")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    if not logging.getLogger().handlers:
        logging.basicConfig(
            level=level,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
    _LOGGER.setLevel(level)


def log(*parts: object, **metadata: Any) -> None:
    """
    Emit an info-level log message.

    Keyword metadata (grid point, counts, timings) is appended to the
    message so every line stays greppable without a structured sink.
    """

    message = _coerce(parts)
    if metadata:
        message = f"{message} | {metadata}"

    if not _LOGGER.handlers and not logging.getLogger().handlers:
        logging.basicConfig(level=logging.INFO)

    _LOGGER.info(message)


__all__ = ["configure_logging", "log"]
