"""Versioned npz dumps of prepared datasets for fast reload."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from app.errors import DataError
from app.kernels import SampleMatrix
from app.regression.outputs import OutputMatrix

from .datasets import LabeledDataset

logger = logging.getLogger(__name__)

CACHE_VERSION = 1


def save_dataset_cache(dataset: LabeledDataset, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "version": CACHE_VERSION,
        "split": dataset.split,
        "encoding": dataset.Y.encoding,
        "num_classes": dataset.Y.num_classes,
        "metadata": dataset.metadata,
    }
    with target.open("wb") as handle:
        np.savez(
            handle,
            header=np.array(json.dumps(header, default=str)),
            X=dataset.X.data,
            Y=dataset.Y.values,
        )
    return target


def load_dataset_cache(path: str | Path) -> LabeledDataset:
    source = Path(path)
    try:
        with np.load(source, allow_pickle=False) as archive:
            header = json.loads(archive["header"].item())
            X, Y = archive["X"], archive["Y"]
    except FileNotFoundError as exc:
        raise DataError(f"Dataset cache not found: {source}") from exc
    except (KeyError, ValueError, OSError) as exc:
        raise DataError(f"{source} is not a dataset cache: {exc}") from exc

    if header.get("version") != CACHE_VERSION:
        raise DataError(f"{source} has cache version {header.get('version')}, expected {CACHE_VERSION}.")
    logger.debug("[data] loaded cache %s", source)
    return LabeledDataset(
        X=SampleMatrix(X),
        Y=OutputMatrix(Y, encoding=header["encoding"], num_classes=header.get("num_classes")),
        split=header["split"],
        metadata=header.get("metadata") or {},
    )


__all__ = ["CACHE_VERSION", "save_dataset_cache", "load_dataset_cache"]
