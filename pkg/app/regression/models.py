"""Kernel regression on a full or reduced sample set, and model metrics."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from app.config import CONFIG
from app.errors import ConfigError, DataError, DimensionMismatchError, NonFiniteInputError
from app.kernels import GramMatrix, KernelSpec, SampleMatrix, as_vector, cross_values, ensure_samples, gram

from .outputs import Encoding, OutputMatrix
from .solvers import least_squares_right, solve_spd_right

if TYPE_CHECKING:
    from app.data.normalization import Normalizer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReducedModel:
    """``f(x) = theta @ [k(x_i, x)]_{x_i in selected_X}``."""

    selected_X: SampleMatrix
    theta: np.ndarray
    kernel: KernelSpec
    gamma: float
    normalization: Optional["Normalizer"] = None
    encoding: Encoding = "regression"
    selected_indices: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=np.float64, copy=True)
        if theta.ndim == 1:
            theta = theta.reshape(1, -1)
        if theta.ndim != 2 or theta.shape[1] != self.selected_X.m:
            raise DimensionMismatchError(
                f"theta must have {self.selected_X.m} columns (one per selected sample), got shape {theta.shape}."
            )
        if not np.all(np.isfinite(theta)):
            raise NonFiniteInputError("theta contains NaN or Inf entries.")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}.")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def d(self) -> int:
        return self.selected_X.d

    @property
    def d_out(self) -> int:
        return int(self.theta.shape[0])

    @property
    def size(self) -> int:
        return self.selected_X.m

    def with_theta(self, theta: np.ndarray) -> "ReducedModel":
        return ReducedModel(
            selected_X=self.selected_X,
            theta=theta,
            kernel=self.kernel,
            gamma=self.gamma,
            normalization=self.normalization,
            encoding=self.encoding,
            selected_indices=self.selected_indices,
        )


def _resolve_gamma(gamma: Optional[float]) -> float:
    value = float(CONFIG.default_gamma if gamma is None else gamma)
    if not np.isfinite(value) or value < 0:
        raise ConfigError(f"gamma must be a finite value >= 0, got {gamma}.")
    return value


def _check_outputs(X: SampleMatrix, Y: OutputMatrix) -> None:
    if Y.m != X.m:
        raise DimensionMismatchError(f"X has {X.m} samples but Y has {Y.m} columns.")


def fit_reduced(
    spec: KernelSpec,
    X: SampleMatrix,
    Y: OutputMatrix,
    selected: Sequence[int],
    gamma: Optional[float] = None,
    *,
    gram_matrix: Optional[GramMatrix] = None,
    normalization: Optional["Normalizer"] = None,
) -> ReducedModel:
    """Fit ``theta`` on ``G_{selected, X}`` against all training outputs.

    ``gamma = 0`` gives the minimum-norm least-squares solution;
    ``gamma > 0`` solves ``theta (G_sx G_xs + gamma I) = Y G_xs``.
    """

    _check_outputs(X, Y)
    idx = np.asarray(list(selected), dtype=np.intp)
    if idx.size == 0:
        raise ConfigError("fit_reduced needs at least one selected sample.")
    if idx.min() < 0 or idx.max() >= X.m:
        raise DimensionMismatchError(f"Selected indices must lie in [0, {X.m - 1}].")
    gam = _resolve_gamma(gamma)

    if gram_matrix is not None:
        G_sx = gram_matrix.values[idx, :]
    else:
        G_sx = cross_values(spec, X.data[:, idx], X.data)

    if gam == 0.0:
        theta = least_squares_right(Y.values, G_sx)
    else:
        A = G_sx @ G_sx.T
        A[np.diag_indices_from(A)] += gam
        theta = solve_spd_right(Y.values @ G_sx.T, A)

    logger.debug("[regression] reduced fit m~=%d m=%d d'=%d gamma=%g", idx.size, X.m, Y.d_out, gam)
    return ReducedModel(
        selected_X=X.subset(idx),
        theta=theta,
        kernel=spec,
        gamma=gam,
        normalization=normalization,
        encoding=Y.encoding,
        selected_indices=tuple(int(i) for i in idx),
    )


def fit_full(
    spec: KernelSpec,
    X: SampleMatrix,
    Y: OutputMatrix,
    gamma: Optional[float] = None,
    *,
    gram_matrix: Optional[GramMatrix] = None,
    normalization: Optional["Normalizer"] = None,
) -> ReducedModel:
    """Kernel ridge regression on every sample: ``theta = Y (G + gamma I)^{-1}``."""

    _check_outputs(X, Y)
    gam = _resolve_gamma(gamma)
    G = gram_matrix.values if gram_matrix is not None else gram(spec, X).values
    A = np.array(G, dtype=np.float64, copy=True)
    A[np.diag_indices_from(A)] += gam
    theta = solve_spd_right(Y.values, A)
    logger.debug("[regression] full fit m=%d d'=%d gamma=%g", X.m, Y.d_out, gam)
    return ReducedModel(
        selected_X=X,
        theta=theta,
        kernel=spec,
        gamma=gam,
        normalization=normalization,
        encoding=Y.encoding,
        selected_indices=tuple(range(X.m)),
    )


def _prepare(model: ReducedModel, X: SampleMatrix | np.ndarray) -> SampleMatrix:
    samples = ensure_samples(X)
    if samples.d != model.d:
        raise DimensionMismatchError(f"Model expects samples of dimension {model.d}, got {samples.d}.")
    if model.normalization is not None:
        samples = model.normalization.transform(samples)
    return samples


def predict_batch(model: ReducedModel, X: SampleMatrix | np.ndarray) -> np.ndarray:
    """Predictions for every column of ``X`` as a ``d' x n`` matrix."""

    samples = _prepare(model, X)
    K = cross_values(model.kernel, model.selected_X.data, samples.data)
    return model.theta @ K


def predict(model: ReducedModel, x: Sequence[float] | np.ndarray) -> np.ndarray:
    vector = as_vector(x, label="x")
    if vector.size != model.d:
        raise DimensionMismatchError(f"Model expects samples of dimension {model.d}, got {vector.size}.")
    return predict_batch(model, vector.reshape(-1, 1))[:, 0]


def classify_batch(model: ReducedModel, X: SampleMatrix | np.ndarray) -> np.ndarray:
    # argmax returns the first maximum, so ties go to the lowest class.
    return np.argmax(predict_batch(model, X), axis=0).astype(np.intp)


def classify(model: ReducedModel, x: Sequence[float] | np.ndarray) -> int:
    return int(np.argmax(predict(model, x)))


def classification_rate(model: ReducedModel, X_test: SampleMatrix | np.ndarray, labels: Sequence[int] | np.ndarray) -> float:
    truth = np.asarray(labels).reshape(-1)
    if truth.size == 0:
        raise DataError("classification_rate needs a non-empty test set.")
    predicted = classify_batch(model, X_test)
    if predicted.size != truth.size:
        raise DimensionMismatchError(f"Test set has {predicted.size} samples but {truth.size} labels.")
    return float(np.mean(predicted == truth))


def mean_squared_error(model: ReducedModel, X_test: SampleMatrix | np.ndarray, Y_test: OutputMatrix | np.ndarray) -> float:
    """Mean of squared residuals over every output entry of every test sample."""

    target = Y_test.values if isinstance(Y_test, OutputMatrix) else np.asarray(Y_test, dtype=np.float64)
    if target.ndim == 1:
        target = target.reshape(1, -1)
    if target.size == 0:
        raise DataError("mean_squared_error needs a non-empty test set.")
    predicted = predict_batch(model, X_test)
    if predicted.shape != target.shape:
        raise DimensionMismatchError(f"Predictions have shape {predicted.shape}, targets {target.shape}.")
    return float(np.mean((predicted - target) ** 2))


__all__ = [
    "ReducedModel",
    "fit_reduced",
    "fit_full",
    "predict",
    "predict_batch",
    "classify",
    "classify_batch",
    "classification_rate",
    "mean_squared_error",
]
