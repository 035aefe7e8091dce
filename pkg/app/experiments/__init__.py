"""Experiment harness: configuration, grid fan-out and result tables."""

from .config import ExperimentConfig, build_config
from .calcofi import run_calcofi
from .fpu import run_fpu
from .generic import run_generic
from .mnist import run_mnist
from .runner import RUNNERS, run_experiment

__all__ = [
    "ExperimentConfig",
    "build_config",
    "run_mnist",
    "run_fpu",
    "run_calcofi",
    "run_generic",
    "run_experiment",
    "RUNNERS",
]
