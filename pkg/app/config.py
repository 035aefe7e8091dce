"""Environment-driven runtime settings for the kFSA toolkit."""

from __future__ import annotations

import os
from types import SimpleNamespace
from typing import Optional, Sequence, Tuple


def _env_str(
    name: str,
    default: Optional[str] = None,
    *,
    alias: Optional[str] = None,
    empty_to_none: bool = True,
) -> Optional[str]:
    raw = os.getenv(name)
    if raw is None and alias:
        raw = os.getenv(alias)
    if raw is None:
        return default
    value = raw.strip()
    if not value and empty_to_none:
        return None if default is None else default
    return value if value else default


def _env_bool(name: str, default: bool, *, alias: Optional[str] = None) -> bool:
    raw = os.getenv(name)
    if raw is None and alias:
        raw = os.getenv(alias)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return int(raw.strip())
    except ValueError:
        return default


def _env_float(name: str, default: float, *, alias: Optional[str] = None) -> float:
    raw = os.getenv(name)
    if raw is None and alias:
        raw = os.getenv(alias)
    if raw is None:
        return default
    try:
        return float(raw.strip())
    except ValueError:
        return default


def _env_tuple(name: str, default: Sequence[str]) -> Tuple[str, ...]:
    raw = os.getenv(name)
    if not raw:
        return tuple(default)
    items = tuple(part.strip() for part in raw.split(",") if part.strip())
    return items or tuple(default)


class Settings(SimpleNamespace):
    """Simple attribute container used throughout the codebase."""

CONFIG = Settings()

DEFAULT_CALCOFI_INPUTS: Tuple[str, ...] = ("Depthm", "R_PRES", "T_degC", "Salnty")
DEFAULT_CALCOFI_OUTPUT = "O2ml_L"


def _compute_values() -> tuple[dict[str, object], dict[str, object]]:
    # -----------------------------------------------------------------------
    # RUNTIME ENVIRONMENT
    # -----------------------------------------------------------------------
    environment = _env_str("ENV", "prod", empty_to_none=False).lower()
    if environment not in {"dev", "test", "prod"}:
        environment = "prod"

    # -----------------------------------------------------------------------
    # DATA & OUTPUT LOCATIONS
    # -----------------------------------------------------------------------
    data_dir = _env_str("KFSA_DATA_DIR", "data", empty_to_none=False)
    output_dir = _env_str("KFSA_OUTPUT_DIR", "results", empty_to_none=False)
    cache_dir = _env_str("KFSA_CACHE_DIR", os.path.join(data_dir, "cache"), empty_to_none=False)

    # -----------------------------------------------------------------------
    # GRAM CONSTRUCTION
    # -----------------------------------------------------------------------
    gram_chunk_rows = max(_env_int("KFSA_GRAM_CHUNK_ROWS", 1024), 1)
    gram_workers = max(_env_int("KFSA_GRAM_WORKERS", 1), 1)
    gram_byte_budget = max(_env_int("KFSA_GRAM_BYTE_BUDGET", 2 * 1024**3), 1)

    # -----------------------------------------------------------------------
    # REGRESSION DEFAULTS
    # -----------------------------------------------------------------------
    default_gamma = _env_float("KFSA_DEFAULT_GAMMA", 1e-10)
    if default_gamma < 0:
        default_gamma = 1e-10

    # -----------------------------------------------------------------------
    # CALCOFI COLUMN MAPPING
    # -----------------------------------------------------------------------
    calcofi_inputs = _env_tuple("KFSA_CALCOFI_INPUTS", DEFAULT_CALCOFI_INPUTS)
    calcofi_output = _env_str("KFSA_CALCOFI_OUTPUT", DEFAULT_CALCOFI_OUTPUT, empty_to_none=False)

    # -----------------------------------------------------------------------
    # LOGGING & WORKERS
    # -----------------------------------------------------------------------
    log_level = _env_str("KFSA_LOG_LEVEL", "INFO", empty_to_none=False).upper()
    quiet_progress = _env_bool("KFSA_QUIET_PROGRESS", False)
    celery_broker_url = _env_str("CELERY_BROKER_URL", "redis://localhost:6379/0", empty_to_none=False)
    celery_result_backend = _env_str("CELERY_RESULT_BACKEND", celery_broker_url, empty_to_none=False)
    celery_default_queue = _env_str("CELERY_DEFAULT_QUEUE", "kfsa", empty_to_none=False)
    celery_task_timeout = _env_int("CELERY_TASK_TIMEOUT", 6 * 3600)

    globals_map = {
        "ENVIRONMENT": environment,
        "DATA_DIR": data_dir,
        "OUTPUT_DIR": output_dir,
        "CACHE_DIR": cache_dir,
        "GRAM_CHUNK_ROWS": gram_chunk_rows,
        "GRAM_WORKERS": gram_workers,
        "GRAM_BYTE_BUDGET": gram_byte_budget,
        "DEFAULT_GAMMA": default_gamma,
        "CALCOFI_INPUTS": calcofi_inputs,
        "CALCOFI_OUTPUT": calcofi_output,
        "LOG_LEVEL": log_level,
        "QUIET_PROGRESS": quiet_progress,
        "CELERY_BROKER_URL": celery_broker_url,
        "CELERY_RESULT_BACKEND": celery_result_backend,
        "CELERY_DEFAULT_QUEUE": celery_default_queue,
        "CELERY_TASK_TIMEOUT": celery_task_timeout,
    }

    config_map = {key.lower(): value for key, value in globals_map.items()}

    return globals_map, config_map


def reload_config() -> None:
    globals_map, config_map = _compute_values()
    globals().update(globals_map)
    CONFIG.__dict__.update(config_map)


def load_envs(global_dir: str) -> None:
    """Load environment variables from a ``.env`` file and refresh settings."""
    from dotenv import load_dotenv

    load_dotenv(os.path.join(global_dir, ".env"))
    reload_config()


# Load once on import so downstream modules can use CONFIG immediately.
reload_config()
