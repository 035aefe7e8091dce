"""Result tables and run metadata.

Metric tables are written as CSV or JSON; every row carries the full
parameter tuple. Timings and versions go to a separate metadata JSON
so the metric files stay byte-identical across reruns.
"""

from __future__ import annotations

import json
import math
import platform
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from app.errors import ConfigError


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def _json_value(value: Any) -> Any:
    """Missing and non-finite cells become null so the output stays strict JSON."""
    value = _plain(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def plain_rows(rows: Iterable[Mapping[str, Any]]) -> List[Dict[str, Any]]:
    """Rows with numpy scalars replaced by builtins (JSON and Celery safe)."""
    return [{k: _plain(v) for k, v in row.items()} for row in rows]


def sort_rows(rows: Iterable[Mapping[str, Any]], keys: Sequence[str]) -> List[Dict[str, Any]]:
    """Order rows by their parameter tuple (missing keys sort first)."""

    def key(row: Mapping[str, Any]) -> tuple:
        parts = []
        for name in keys:
            value = row.get(name)
            parts.append((0, "") if value is None else (1, value))
        return tuple(parts)

    return plain_rows(sorted(rows, key=key))


def write_table(
    rows: Sequence[Mapping[str, Any]],
    out_dir: str | Path,
    name: str,
    fmt: str = "csv",
    *,
    columns: Optional[Sequence[str]] = None,
) -> Path:
    target_dir = Path(out_dir)
    target_dir.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)

    if fmt == "csv":
        path = target_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format="%.12g")
    elif fmt == "json":
        path = target_dir / f"{name}.json"
        records = [{k: _json_value(v) for k, v in record.items()} for record in frame.to_dict(orient="records")]
        path.write_text(json.dumps(records, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    else:
        raise ConfigError(f"Unknown output format '{fmt}'. Expected 'csv' or 'json'.")
    return path


def write_metadata(out_dir: str | Path, name: str, payload: Mapping[str, Any]) -> Path:
    from app import __version__

    target_dir = Path(out_dir)
    target_dir.mkdir(parents=True, exist_ok=True)
    document = {
        "library_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        **payload,
    }
    path = target_dir / f"{name}.meta.json"
    path.write_text(json.dumps(document, indent=2, default=str) + "\n", encoding="utf-8")
    return path


__all__ = ["plain_rows", "sort_rows", "write_table", "write_metadata"]
