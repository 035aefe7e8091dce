"""Experiment configuration.

Parameters come from an optional YAML file (``--config``) overlaid by
command-line flags, and are validated by :class:`ExperimentConfig`.
Grids accept lists or comma separated strings.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.config import CONFIG
from app.errors import ConfigError

ExperimentName = Literal["mnist", "fpu", "calcofi", "generic"]

MNIST_KAPPAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
MNIST_EPSILONS = [1.0, 0.54, 0.27, 0.19, 0.16, 0.07, 0.04, 0.02, 0.01]
FPU_DIMENSIONS = list(range(2, 21))
CALCOFI_KAPPAS = [1.0, 5.0, 10.0, 25.0, 50.0, 100.0]
CALCOFI_EPSILONS = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10]

_DEFAULT_KERNELS = {"mnist": "composite", "fpu": "polynomial", "calcofi": "gaussian", "generic": "gaussian"}


def _split_list(value: Any) -> Any:
    if value is None or isinstance(value, (list, tuple)):
        return value
    if isinstance(value, (int, float)):
        return [value]
    text = str(value).strip()
    if not text:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


def _int_range(value: Any) -> Any:
    """Accept ``"2-10"`` as well as comma lists for dimension grids."""
    if isinstance(value, str) and "-" in value and "," not in value:
        start, _, stop = value.partition("-")
        return list(range(int(start), int(stop) + 1))
    return _split_list(value)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: ExperimentName
    kernel: Optional[Literal["gaussian", "polynomial", "cosine", "composite"]] = None
    kappa: Optional[List[float]] = None
    epsilon: Optional[List[float]] = None
    gamma: float = Field(default_factory=lambda: float(CONFIG.default_gamma), ge=0)
    degree: int = Field(default=3, ge=1)

    train: Optional[str] = None
    test: Optional[str] = None
    subsample: Optional[int] = Field(default=None, ge=1)
    test_subsample: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    out: str = Field(default_factory=lambda: str(CONFIG.output_dir))
    format: Literal["csv", "json"] = "csv"
    low_memory: Optional[bool] = None
    max_selected: Optional[int] = Field(default=None, ge=1)
    chunk_size: Optional[int] = Field(default=None, ge=1)
    save_model: bool = False
    cache: bool = False

    nystrom: Literal["off", "uniform", "leverage"] = "off"
    budget_match: bool = False
    budget: Optional[int] = Field(default=None, ge=1)

    # FPU
    d: Optional[List[int]] = None
    m: int = Field(default=2000, ge=1)
    trials: int = Field(default=1, ge=1)
    beta: float = 0.7
    reduced_gamma: float = Field(default=0.0, ge=0)
    export_coefficients: bool = False

    # generic tables
    features: Optional[List[str]] = None
    targets: Optional[List[str]] = None
    task: Literal["regression", "classification"] = "regression"
    normalize: bool = False

    include_full: bool = False
    dispatch: Literal["local", "celery"] = "local"
    workers: int = Field(default=1, ge=1)

    @field_validator("kappa", "epsilon", "features", "targets", mode="before")
    @classmethod
    def _listify(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("d", mode="before")
    @classmethod
    def _dimensions(cls, value: Any) -> Any:
        return _int_range(value)

    @field_validator("experiment", "kernel", "nystrom", "format", "task", "dispatch", mode="before")
    @classmethod
    def _lower(cls, value: Any) -> Any:
        return value.strip().lower() if isinstance(value, str) else value

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        filled = dict(data)
        experiment = str(filled.get("experiment") or "").strip().lower()
        if experiment not in _DEFAULT_KERNELS:
            return filled
        if not filled.get("kernel"):
            filled["kernel"] = _DEFAULT_KERNELS[experiment]
        if filled.get("kappa") in (None, ""):
            filled["kappa"] = {
                "mnist": MNIST_KAPPAS,
                "fpu": [1.0],
                "calcofi": CALCOFI_KAPPAS,
                "generic": [1.0],
            }[experiment]
        if filled.get("epsilon") in (None, ""):
            filled["epsilon"] = {
                "mnist": MNIST_EPSILONS,
                "fpu": [1e-10],
                "calcofi": CALCOFI_EPSILONS,
                "generic": [1e-6],
            }[experiment]
        if experiment == "fpu" and filled.get("d") in (None, ""):
            filled["d"] = FPU_DIMENSIONS
        return filled

    @model_validator(mode="after")
    def _check_grids(self) -> "ExperimentConfig":
        if not self.kappa or not self.epsilon:
            raise ValueError("kappa and epsilon grids must not be empty")
        if any(eps <= 0 for eps in self.epsilon):
            raise ValueError("epsilon must be > 0; use --include-full for the full-set fit")
        if self.kernel == "polynomial":
            kappa_ok = all(k >= 0 for k in self.kappa)
        else:
            kappa_ok = all(k > 0 for k in self.kappa)
        if not kappa_ok:
            raise ValueError(f"invalid kappa grid {self.kappa} for the {self.kernel} kernel")
        if self.d is not None and (not self.d or any(dim < 1 for dim in self.d)):
            raise ValueError("dimension grid must hold integers >= 1")
        if self.experiment == "generic" and (not self.features or not self.targets):
            raise ValueError("generic runs need --features and --targets")
        if self.experiment == "generic" and self.task == "classification" and len(self.targets or []) != 1:
            raise ValueError("classification needs exactly one label column in --targets")
        if self.nystrom != "off" and not self.budget_match and self.budget is None:
            raise ValueError("Nyström comparison needs --budget or --budget-match")
        return self

    @property
    def output_dir(self) -> Path:
        return Path(self.out)

    def to_payload(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _read_yaml(path: str | Path) -> Dict[str, Any]:
    source = Path(path)
    try:
        with source.open("r", encoding="utf-8") as handle:
            payload = yaml.safe_load(handle) or {}
    except FileNotFoundError as exc:
        raise ConfigError(f"Config file not found: {source}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"Config file {source} is not valid YAML: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"Config file {source} must contain a mapping.")
    return {str(key).replace("-", "_"): value for key, value in payload.items()}


def build_config(cli_params: Mapping[str, Any], config_path: Optional[str] = None) -> ExperimentConfig:
    """Merge ``--config`` YAML with flags; flags win."""

    merged: Dict[str, Any] = _read_yaml(config_path) if config_path else {}
    merged.update({key.replace("-", "_"): value for key, value in cli_params.items()})
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(f"Invalid experiment configuration:\n{exc}") from exc


__all__ = [
    "ExperimentName",
    "ExperimentConfig",
    "build_config",
    "MNIST_KAPPAS",
    "MNIST_EPSILONS",
    "FPU_DIMENSIONS",
    "CALCOFI_KAPPAS",
    "CALCOFI_EPSILONS",
]
