"""Governing-equation recovery for the FPU chain.

Every ``(d, trial)`` point draws a fresh sample set, selects with kFSA
on the polynomial kernel, fits reduced (``reduced_gamma``) and full-set
(``gamma``) models and compares the recovered coefficients with the
exact ones. ``run_fpu`` returns the per-trial rows and a per-dimension
summary with the median and 5th/95th percentiles of the errors.
"""

from __future__ import annotations

import logging
from math import comb
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from app.data import generate_fpu
from app.features import (
    CoefficientMatrix,
    enumerate_monomials,
    exact_fpu_coefficients,
    recover_coefficients,
    relative_coefficient_error,
)
from app.regression import fit_full, fit_reduced
from .common import Row, dense_gram_or_none, kernel_for, model_stem, save_fitted, select
from .config import ExperimentConfig
from .grid import run_grid
from .tables import sort_rows

logger = logging.getLogger(__name__)

TRIAL_ORDER = ("d", "kappa", "epsilon", "method", "trial")
SUMMARY_ORDER = ("d", "kappa", "epsilon", "method")
FULL_EPSILON = 0.0


def expected_count(d: int, q: int) -> int:
    """Number of monomials of degree <= q in d variables."""
    return comb(d + q, q)


def _export(config: ExperimentConfig, recovered: CoefficientMatrix, stem: str) -> None:
    target = Path(config.out) / "coefficients" / f"{stem}.csv"
    CoefficientMatrix(recovered.values, recovered.dictionary, row_names=_row_names(recovered)).to_csv(target)


def _row_names(matrix: CoefficientMatrix):
    return tuple(f"x{i}''" for i in range(1, matrix.values.shape[0] + 1))


def evaluate_point(config: ExperimentConfig, params: Dict[str, Any]) -> List[Row]:
    d = int(params["d"])
    trial = int(params.get("trial", 0))
    seed = config.seed + trial
    dataset = generate_fpu(d, config.m, config.beta, seed)
    X, Y = dataset.X, dataset.Y
    expected = expected_count(d, config.degree)

    rows: List[Row] = []
    for kappa in config.kappa:
        spec = kernel_for(config, kappa, d)
        dictionary = enumerate_monomials(d, config.degree, kappa)
        exact = exact_fpu_coefficients(d, config.beta, dictionary)
        G = dense_gram_or_none(spec, dataset, config)
        base = {
            "experiment": "fpu",
            "d": d,
            "trial": trial,
            "seed": seed,
            "m": config.m,
            "beta": config.beta,
            "kappa": float(kappa),
            "degree": config.degree,
            "expected": expected,
        }

        def record(method: str, epsilon: float, gamma: float, selected: int, recovered: CoefficientMatrix, **extra: Any) -> None:
            rows.append(
                {
                    **base,
                    "method": method,
                    "epsilon": epsilon,
                    "gamma": gamma,
                    "selected": selected,
                    "relative_error": relative_coefficient_error(recovered, exact),
                    **extra,
                }
            )
            if config.export_coefficients:
                _export(config, recovered, f"fpu_d{d}_trial{trial}_kappa{kappa:g}_{method}_eps{epsilon:g}")

        for epsilon in config.epsilon:
            selection = select(config, spec, X, epsilon, G)
            model = fit_reduced(spec, X, Y, selection.selected, config.reduced_gamma, gram_matrix=G)
            save_fitted(config, model, model_stem("fpu", kappa, "kfsa", epsilon, d=d, trial=trial))
            record(
                "kfsa",
                epsilon,
                config.reduced_gamma,
                selection.size,
                recover_coefficients(model, dictionary),
                truncated=selection.truncated,
            )

        full = fit_full(spec, X, Y, config.gamma, gram_matrix=G)
        save_fitted(config, full, model_stem("fpu", kappa, "full", FULL_EPSILON, d=d, trial=trial))
        record("full", FULL_EPSILON, config.gamma, X.m, recover_coefficients(full, dictionary), truncated=False)

    logger.info("[experiment:fpu] d=%d trial=%d done", d, trial)
    return rows


def summarize(rows: List[Row]) -> List[Row]:
    """Median and 5th/95th percentile of the errors over trials."""

    if not rows:
        return []
    frame = pd.DataFrame(rows)
    summary: List[Row] = []
    for key, group in frame.groupby(list(SUMMARY_ORDER), sort=True):
        d, kappa, epsilon, method = key
        errors = group["relative_error"].to_numpy(dtype=np.float64)
        p5, median, p95 = np.percentile(errors, [5, 50, 95])
        summary.append(
            {
                "experiment": "fpu",
                "d": int(d),
                "kappa": float(kappa),
                "epsilon": float(epsilon),
                "method": method,
                "gamma": float(group["gamma"].iloc[0]),
                "seed": int(group["seed"].min()),
                "m": int(group["m"].iloc[0]),
                "beta": float(group["beta"].iloc[0]),
                "degree": int(group["degree"].iloc[0]),
                "trials": int(len(group)),
                "expected": int(group["expected"].iloc[0]),
                "selected_min": int(group["selected"].min()),
                "selected_max": int(group["selected"].max()),
                "median_error": float(median),
                "p5_error": float(p5),
                "p95_error": float(p95),
            }
        )
    return summary


def grid_points(config: ExperimentConfig, dimensions: Optional[List[int]] = None) -> List[Dict[str, Any]]:
    dims = dimensions if dimensions is not None else list(config.d or [])
    return [{"d": d, "trial": trial} for d in dims for trial in range(config.trials)]


def run_fpu(config: ExperimentConfig) -> Dict[str, List[Row]]:
    trials = sort_rows(run_grid(config, grid_points(config)), TRIAL_ORDER)
    return {"fpu": sort_rows(summarize(trials), SUMMARY_ORDER), "fpu_trials": trials}


__all__ = ["evaluate_point", "run_fpu", "summarize", "grid_points", "expected_count"]
