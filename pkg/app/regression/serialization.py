"""Versioned YAML model files.

A model document carries everything needed to predict: the kernel,
the selected samples, ``theta``, the normalisation constants and the
``gamma`` used at fit time. Documents are validated with pydantic on
load so malformed files fail with a readable message.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from app.data.normalization import Normalizer
from app.errors import ConfigError, DataError
from app.kernels import SampleMatrix, kernel_from_dict

from .models import ReducedModel

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = {1}


class NormalizationDocument(BaseModel):
    lower: List[float]
    upper: List[float]

    @model_validator(mode="after")
    def _same_length(self) -> "NormalizationDocument":
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same length")
        return self


class ModelDocument(BaseModel):
    format_version: int
    kernel: Dict[str, Any]
    gamma: float = Field(..., ge=0)
    encoding: Literal["regression", "one_hot"] = "regression"
    selected_samples: List[List[float]] = Field(..., min_length=1)
    selected_indices: Optional[List[int]] = None
    theta: List[List[float]] = Field(..., min_length=1)
    normalization: Optional[NormalizationDocument] = None

    @field_validator("format_version")
    @classmethod
    def _known_version(cls, value: int) -> int:
        if value not in SUPPORTED_VERSIONS:
            raise ValueError(f"unsupported model format version {value}")
        return value

    @model_validator(mode="after")
    def _consistent_shapes(self) -> "ModelDocument":
        widths = {len(row) for row in self.theta}
        if widths != {len(self.selected_samples)}:
            raise ValueError("every theta row needs one entry per selected sample")
        dims = {len(sample) for sample in self.selected_samples}
        if len(dims) != 1:
            raise ValueError("selected samples must share one dimension")
        return self


def model_to_document(model: ReducedModel) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kernel": model.kernel.to_dict(),
        "gamma": float(model.gamma),
        "encoding": model.encoding,
        # One entry per selected sample (rows of X_tilde^T).
        "selected_samples": model.selected_X.data.T.tolist(),
        "selected_indices": list(model.selected_indices) if model.selected_indices is not None else None,
        "theta": model.theta.tolist(),
        "normalization": model.normalization.to_dict() if model.normalization is not None else None,
    }


def model_from_document(payload: Dict[str, Any]) -> ReducedModel:
    try:
        document = ModelDocument.model_validate(payload)
    except ValidationError as exc:
        raise DataError(f"Invalid model document: {exc}") from exc

    try:
        kernel = kernel_from_dict(document.kernel)
    except ConfigError as exc:
        raise DataError(f"Invalid kernel in model document: {exc}") from exc

    normalization = None
    if document.normalization is not None:
        normalization = Normalizer(
            np.asarray(document.normalization.lower), np.asarray(document.normalization.upper)
        )
    return ReducedModel(
        selected_X=SampleMatrix.from_rows(np.asarray(document.selected_samples)),
        theta=np.asarray(document.theta),
        kernel=kernel,
        gamma=document.gamma,
        normalization=normalization,
        encoding=document.encoding,
        selected_indices=tuple(document.selected_indices) if document.selected_indices is not None else None,
    )


def save_model(model: ReducedModel, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8") as handle:
        yaml.safe_dump(model_to_document(model), handle, sort_keys=False)
    return target


def load_model(path: str | Path) -> ReducedModel:
    source = Path(path)
    try:
        with source.open("r", encoding="utf-8") as handle:
            payload = yaml.safe_load(handle)
    except FileNotFoundError as exc:
        raise DataError(f"Model file not found: {source}") from exc
    except yaml.YAMLError as exc:
        raise DataError(f"Model file {source} is not valid YAML: {exc}") from exc
    if not isinstance(payload, dict):
        raise DataError(f"Model file {source} does not contain a mapping.")
    return model_from_document(payload)


__all__ = [
    "FORMAT_VERSION",
    "ModelDocument",
    "model_to_document",
    "model_from_document",
    "save_model",
    "load_model",
]
