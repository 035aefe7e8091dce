"""Run a configured experiment and write its tables."""

from __future__ import annotations

import time
from pathlib import Path
from typing import Callable, Dict, List

from app.logger import log

from .calcofi import run_calcofi
from .common import Row
from .config import ExperimentConfig
from .fpu import run_fpu
from .generic import run_generic
from .mnist import run_mnist
from .tables import write_metadata, write_table

Runner = Callable[[ExperimentConfig], Dict[str, List[Row]]]

RUNNERS: Dict[str, Runner] = {
    "mnist": run_mnist,
    "fpu": run_fpu,
    "calcofi": run_calcofi,
    "generic": run_generic,
}


def _subsampling(config: ExperimentConfig) -> Dict[str, object]:
    return {
        "subsample": config.subsample,
        "test_subsample": config.test_subsample,
        "seed": config.seed,
        "stratified": config.experiment == "mnist",
    }


def run_experiment(config: ExperimentConfig) -> List[Path]:
    """Evaluate the grid, write every table plus one metadata file.

    Returns the written paths, tables first.
    """

    runner = RUNNERS[config.experiment]
    log(f"[experiment:{config.experiment}] starting", kappa=config.kappa, epsilon=config.epsilon)
    started = time.perf_counter()
    tables = runner(config)
    elapsed = time.perf_counter() - started

    paths = [write_table(rows, config.output_dir, name, config.format) for name, rows in tables.items()]
    paths.append(
        write_metadata(
            config.output_dir,
            config.experiment,
            {
                "config": config.to_payload(),
                "tables": {name: len(rows) for name, rows in tables.items()},
                "subsampling": _subsampling(config),
                "elapsed_seconds": round(elapsed, 3),
            },
        )
    )
    log(f"[experiment:{config.experiment}] finished", seconds=round(elapsed, 3), files=[str(p) for p in paths])
    return paths


__all__ = ["RUNNERS", "run_experiment"]
