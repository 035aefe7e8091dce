"""Kernel regression and classification on full or reduced sample sets."""

from .outputs import Encoding, OutputMatrix, one_hot
from .solvers import least_squares_right, pseudo_inverse_right, solve_spd_right
from .models import (
    ReducedModel,
    classification_rate,
    classify,
    classify_batch,
    fit_full,
    fit_reduced,
    mean_squared_error,
    predict,
    predict_batch,
)
from .serialization import FORMAT_VERSION, load_model, model_from_document, model_to_document, save_model

__all__ = [
    "Encoding",
    "OutputMatrix",
    "one_hot",
    "least_squares_right",
    "pseudo_inverse_right",
    "solve_spd_right",
    "ReducedModel",
    "fit_reduced",
    "fit_full",
    "predict",
    "predict_batch",
    "classify",
    "classify_batch",
    "classification_rate",
    "mean_squared_error",
    "FORMAT_VERSION",
    "save_model",
    "load_model",
    "model_to_document",
    "model_from_document",
]
