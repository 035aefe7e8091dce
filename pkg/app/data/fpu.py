"""Synthetic data for the Fermi-Pasta-Ulam chain.

``x_i'' = (x_{i+1} - 2 x_i + x_{i-1}) + beta ((x_{i+1} - x_i)^3 - (x_i - x_{i-1})^3)``
with fixed ends ``x_0 = x_{d+1} = 0``.
"""

from __future__ import annotations

import numpy as np

from app.errors import ConfigError
from app.kernels import SampleMatrix, ensure_samples
from app.regression.outputs import OutputMatrix

from .datasets import LabeledDataset

DEFAULT_BETA = 0.7
DISPLACEMENT_BOUND = 0.1


def fpu_acceleration(X: SampleMatrix | np.ndarray, beta: float = DEFAULT_BETA) -> np.ndarray:
    """Analytic right-hand side for every column of ``X``."""

    samples = ensure_samples(X)
    padded = np.pad(samples.data, ((1, 1), (0, 0)))
    forward = padded[2:] - padded[1:-1]
    backward = padded[1:-1] - padded[:-2]
    return (forward - backward) + beta * (forward**3 - backward**3)


def generate_fpu(d: int, m: int, beta: float = DEFAULT_BETA, seed: int = 0) -> LabeledDataset:
    """Uniform displacements in ``[-0.1, 0.1]^d`` drawn from ``PCG64(seed)``."""

    if d < 1 or m < 1:
        raise ConfigError(f"FPU data needs d >= 1 and m >= 1, got d={d}, m={m}.")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    X = DISPLACEMENT_BOUND * (2.0 * rng.random((int(d), int(m))) - 1.0)
    return LabeledDataset(
        X=SampleMatrix(X),
        Y=OutputMatrix(fpu_acceleration(X, beta)),
        split="train",
        metadata={"d": int(d), "m": int(m), "beta": float(beta), "seed": int(seed)},
    )


__all__ = ["DEFAULT_BETA", "fpu_acceleration", "generate_fpu"]
