"""Sample selection: greedy kFSA and Nyström baselines."""

from .kfsa import SelectionResult, chunked_select, extend_selection, kfsa_select
from .nystrom import STRATEGIES, default_ridge, make_rng, nystrom_residual, nystrom_select, ridge_leverage_scores
from .sources import DenseGramSource, GramSource, OnDemandGramSource, as_source, make_source
from .state import (
    NUMERICAL_FLOOR,
    SelectionState,
    approximation_error,
    approximation_errors,
    drop_candidates,
    error_vector,
    initial_sample,
    initial_state,
    numerical_floor,
    solve_Z,
    update_Z,
)

__all__ = [
    "NUMERICAL_FLOOR",
    "SelectionState",
    "SelectionResult",
    "GramSource",
    "DenseGramSource",
    "OnDemandGramSource",
    "make_source",
    "as_source",
    "initial_sample",
    "initial_state",
    "numerical_floor",
    "approximation_error",
    "approximation_errors",
    "error_vector",
    "drop_candidates",
    "update_Z",
    "solve_Z",
    "kfsa_select",
    "extend_selection",
    "chunked_select",
    "nystrom_select",
    "nystrom_residual",
    "ridge_leverage_scores",
    "default_ridge",
    "make_rng",
    "STRATEGIES",
]
