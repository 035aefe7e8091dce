"""Pieces shared by the tabular regression experiments."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from app.config import CONFIG
from app.data import LabeledDataset, Normalizer, fit_normalizer, random_split
from app.errors import ConfigError
from app.kernels import GramMatrix, KernelSpec, SampleMatrix, build_kernel, gram, gram_nbytes
from app.regression import ReducedModel, classification_rate, fit_reduced, mean_squared_error, save_model
from app.selection import SelectionResult, chunked_select, kfsa_select, nystrom_residual, nystrom_select

from .config import ExperimentConfig

logger = logging.getLogger(__name__)

Row = Dict[str, Any]


def split_sizes(m: int, train: Optional[int], test: Optional[int], *, default_train: int, default_test: int) -> Tuple[int, int]:
    """Requested split sizes, or defaults capped to what ``m`` allows."""

    n_test = test if test is not None else min(default_test, max(1, m // 6))
    n_train = train if train is not None else min(default_train, m - n_test)
    if n_train < 1 or n_test < 1 or n_train + n_test > m:
        raise ConfigError(f"Cannot split {m} samples into {n_train} train and {n_test} test samples.")
    return n_train, n_test


def holdout(
    dataset: LabeledDataset,
    test: Optional[LabeledDataset],
    config: ExperimentConfig,
    *,
    default_train: int,
    default_test: int,
) -> Tuple[LabeledDataset, LabeledDataset]:
    if test is not None:
        return dataset, test
    n_train, n_test = split_sizes(
        dataset.m, config.subsample, config.test_subsample, default_train=default_train, default_test=default_test
    )
    return random_split(dataset, n_train, n_test, seed=config.seed)


def normalize_split(train: LabeledDataset, enabled: bool) -> Tuple[LabeledDataset, Optional[Normalizer]]:
    """Normalise the training inputs; the model applies the same constants at predict time."""

    if not enabled:
        return train, None
    normalizer = fit_normalizer(train.X)
    return train.with_samples(normalizer.transform(train.X)), normalizer


def kernel_for(config: ExperimentConfig, kappa: float, d: Optional[int] = None) -> KernelSpec:
    """Kernel for one grid point; ``d`` sizes the cosine pixel list and the per-feature composite blocks."""

    kind = config.kernel or "gaussian"
    if kind in ("cosine", "composite"):
        if d is None:
            raise ConfigError(f"The {kind} kernel needs the input dimension.")
        if kind == "cosine":
            return build_kernel(kind, kappa, pixels=range(d))
        return build_kernel(kind, kappa, blocks=[[j] for j in range(d)])
    return build_kernel(kind, kappa, degree=config.degree)


def select(
    config: ExperimentConfig, spec: KernelSpec, X: SampleMatrix, epsilon: float, G: Optional[GramMatrix]
) -> SelectionResult:
    """kFSA over ``X``, streamed in ``--chunk-size`` pieces when that is set."""

    if config.chunk_size is not None and config.chunk_size < X.m:
        return chunked_select(spec, X, epsilon, config.chunk_size, config.max_selected, low_memory=config.low_memory)
    return kfsa_select(spec, X, epsilon, config.max_selected, gram=G, low_memory=config.low_memory)


def model_stem(experiment: str, kappa: float, method: str, epsilon: Optional[float], **extra: Any) -> str:
    parts = [experiment, *(f"{key}{value}" for key, value in extra.items()), f"kappa{kappa:g}", method]
    parts.append("budget" if epsilon is None else f"eps{epsilon:g}")
    return "_".join(parts)


def save_fitted(config: ExperimentConfig, model: ReducedModel, stem: str) -> Optional[Path]:
    """Write ``model`` to ``<out>/models/<stem>.yaml`` when ``--save-model`` is on."""

    if not config.save_model:
        return None
    return save_model(model, config.output_dir / "models" / f"{stem}.yaml")


def dense_gram_or_none(spec: KernelSpec, train: LabeledDataset, config: ExperimentConfig) -> Optional[GramMatrix]:
    """Build the Gram once per kernel when it fits the byte budget."""

    if config.low_memory or gram_nbytes(train.m) > int(CONFIG.gram_byte_budget):
        return None
    return gram(spec, train.X)


def score(model: ReducedModel, test: LabeledDataset, task: str) -> Dict[str, float]:
    if task == "classification":
        return {"classification_rate": classification_rate(model, test.X, test.labels)}
    return {"mse": mean_squared_error(model, test.X, test.Y)}


def _residual(spec: KernelSpec, train: LabeledDataset, selection: SelectionResult, G: Optional[GramMatrix]) -> Optional[float]:
    if G is None:
        return None
    return nystrom_residual(spec, train.X, selection.selected, gram=G)


def selection_rows(
    config: ExperimentConfig,
    kappa: float,
    train: LabeledDataset,
    test: LabeledDataset,
    *,
    normalizer: Optional[Normalizer],
    task: str = "regression",
) -> List[Row]:
    """kFSA (and optional Nyström) fits for every epsilon at one ``kappa``.

    ``train`` must already be normalised when ``normalizer`` is given.
    """

    spec = kernel_for(config, kappa, train.X.d)
    G = dense_gram_or_none(spec, train, config)
    want_residual = config.nystrom != "off"
    base = {
        "experiment": config.experiment,
        "kernel": spec.kind,
        "kappa": float(kappa),
        "gamma": config.gamma,
        "seed": config.seed,
        "train_m": train.m,
        "test_m": test.m,
    }

    def fit_row(method: str, epsilon: Optional[float], selection: SelectionResult) -> Row:
        model = fit_reduced(
            spec, train.X, train.Y, selection.selected, config.gamma, gram_matrix=G, normalization=normalizer
        )
        save_fitted(config, model, model_stem(config.experiment, kappa, method, epsilon))
        row: Row = {
            **base,
            "method": method,
            "epsilon": epsilon,
            "selected": selection.size,
            "truncated": selection.truncated,
            "final_max_error": selection.final_max_error,
            **score(model, test, task),
        }
        if want_residual:
            row["residual"] = _residual(spec, train, selection, G)
        return row

    rows: List[Row] = []
    for epsilon in config.epsilon:
        selection = select(config, spec, train.X, epsilon, G)
        rows.append(fit_row("kfsa", epsilon, selection))
        if config.nystrom != "off" and config.budget_match:
            sampled = nystrom_select(spec, train.X, selection.size, config.nystrom, seed=config.seed, gram=G)
            rows.append(fit_row(sampled.method, epsilon, sampled))

    if config.nystrom != "off" and not config.budget_match:
        budget = min(int(config.budget or 1), train.m)
        sampled = nystrom_select(spec, train.X, budget, config.nystrom, seed=config.seed, gram=G)
        rows.append(fit_row(sampled.method, None, sampled))

    logger.info("[experiment:%s] kappa=%g produced %d rows", config.experiment, kappa, len(rows))
    return rows


ROW_ORDER = ("kappa", "epsilon", "method")


__all__ = [
    "Row",
    "ROW_ORDER",
    "split_sizes",
    "holdout",
    "normalize_split",
    "kernel_for",
    "select",
    "model_stem",
    "save_fitted",
    "dense_gram_or_none",
    "score",
    "selection_rows",
]
