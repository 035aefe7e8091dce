"""Greedy bottom-up feature space approximation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from app.errors import ConfigError
from app.kernels import GramMatrix, KernelSpec, SampleMatrix

from .sources import GramSource, OnDemandGramSource, make_source
from .state import (
    SelectionState,
    drop_candidates,
    error_vector,
    initial_sample,
    initial_state,
    solve_Z,
    update_Z,
)

logger = logging.getLogger(__name__)

StepCallback = Callable[[SelectionState], None]


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of a selection run.

    ``errors_at_selection[i]`` is the approximation error the ``i``-th
    selected sample had at the moment it was picked; for kFSA this
    sequence is the running maximum of the error vector.
    """

    selected: Tuple[int, ...]
    errors_at_selection: Tuple[float, ...]
    final_max_error: float
    steps: int
    truncated: bool = False
    epsilon: Optional[float] = None
    method: str = "kfsa"
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.selected)

    @property
    def indices(self) -> np.ndarray:
        return np.asarray(self.selected, dtype=np.intp)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "epsilon": self.epsilon,
            "selected": list(self.selected),
            "errors_at_selection": list(self.errors_at_selection),
            "final_max_error": self.final_max_error,
            "steps": self.steps,
            "truncated": self.truncated,
            **self.metadata,
        }


def _validate_epsilon(epsilon: float) -> float:
    value = float(epsilon)
    if not math.isfinite(value):
        raise ConfigError(f"epsilon must be finite, got {epsilon}.")
    if value <= 0:
        raise ConfigError(
            "epsilon must be > 0. To use every sample, fit kernel ridge regression on the full set instead."
        )
    return value


def _validate_cap(max_selected: Optional[int], m: int) -> int:
    if max_selected is None:
        return m
    cap = int(max_selected)
    if cap < 1:
        raise ConfigError(f"max_selected must be >= 1, got {max_selected}.")
    return min(cap, m)


def _greedy_loop(
    state: SelectionState,
    source: GramSource,
    epsilon: float,
    cap: int,
    errors: list[float],
    callback: Optional[StepCallback],
) -> Tuple[SelectionState, float, bool]:
    """Run the selection loop until no candidate is left or ``cap`` is hit.

    Returns the final state, the largest error of any discarded candidate
    (measured when it was discarded) and the truncation flag.
    """

    removed_max = 0.0
    while state.remaining.size:
        delta = error_vector(state, source)
        j = int(np.argmax(delta))
        new_index = int(state.remaining[j])
        delta_new = float(delta[j])

        if delta_new < epsilon:
            # Nothing is added, so no remaining error can change.
            removed_max = max(removed_max, delta_new)
            state = drop_candidates(state, np.zeros(delta.size, dtype=bool))
            break

        if state.size >= cap:
            logger.warning(
                "[kfsa] max_selected=%d reached with %d candidates still above epsilon",
                cap,
                int(np.count_nonzero(delta >= epsilon)),
            )
            return state, delta_new, True

        keep = delta >= epsilon
        if not keep.all():
            removed_max = max(removed_max, float(delta[~keep].max()))
        state = drop_candidates(state, keep)
        state = update_Z(state, new_index, delta_new, source)
        errors.append(delta_new)

        if isinstance(source, OnDemandGramSource):
            source.forget(state.selected)
        logger.debug("[kfsa] step %d picked %d (error %.3e, %d left)", state.size, new_index, delta_new, state.remaining.size)
        if callback is not None:
            callback(state)

    return state, removed_max, False


def kfsa_select(
    spec: KernelSpec,
    X: SampleMatrix,
    epsilon: float,
    max_selected: Optional[int] = None,
    *,
    gram: Optional[GramMatrix] = None,
    low_memory: Optional[bool] = None,
    callback: Optional[StepCallback] = None,
) -> SelectionResult:
    """Select ``X_tilde`` so that every discarded sample has error below ``epsilon``.

    The full Gram matrix is built once (or passed as ``gram``) and
    sliced; ``low_memory`` recomputes kernel rows instead. ``callback``
    receives the state after every added sample.
    """

    eps = _validate_epsilon(epsilon)
    cap = _validate_cap(max_selected, X.m)
    source = make_source(spec, X, matrix=gram, low_memory=low_memory)

    first = initial_sample(spec, X, source=source)
    state = initial_state(source, first)
    errors = [float(source.diagonal()[first])]
    if callback is not None:
        callback(state)

    state, final_max, truncated = _greedy_loop(state, source, eps, cap, errors, callback)

    logger.info(
        "[kfsa] selected %d of %d samples (epsilon=%g, %s)",
        state.size,
        X.m,
        eps,
        spec.describe(),
    )
    return SelectionResult(
        selected=tuple(state.selected),
        errors_at_selection=tuple(errors),
        final_max_error=final_max,
        steps=state.size,
        truncated=truncated,
        epsilon=eps,
        method="kfsa",
    )


def extend_selection(
    spec: KernelSpec,
    selected_X: SampleMatrix,
    new_X: SampleMatrix,
    epsilon: float,
    max_selected: Optional[int] = None,
    *,
    low_memory: Optional[bool] = None,
    callback: Optional[StepCallback] = None,
) -> SelectionResult:
    """Continue a selection with fresh samples.

    Indices refer to ``[selected_X | new_X]``; the first ``selected_X.m``
    indices are always kept and only the new samples are candidates.
    """

    eps = _validate_epsilon(epsilon)
    combined = selected_X.hstack(new_X)
    cap = _validate_cap(max_selected, combined.m)
    source = make_source(spec, combined, low_memory=low_memory)

    kept = list(range(selected_X.m))
    remaining = np.arange(selected_X.m, combined.m, dtype=np.intp)
    state = SelectionState(
        selected=kept,
        remaining=remaining,
        Z=solve_Z(source, kept, remaining),
        diag_k=source.diagonal(),
    )

    errors: list[float] = []
    state, final_max, truncated = _greedy_loop(state, source, eps, cap, errors, callback)
    logger.info("[kfsa] extended selection by %d of %d new samples", state.size - len(kept), new_X.m)
    return SelectionResult(
        selected=tuple(state.selected),
        errors_at_selection=tuple(errors),
        final_max_error=final_max,
        steps=state.size,
        truncated=truncated,
        epsilon=eps,
        method="kfsa-extend",
    )


def chunked_select(
    spec: KernelSpec,
    X: SampleMatrix,
    epsilon: float,
    chunk_size: int,
    max_selected: Optional[int] = None,
    *,
    low_memory: Optional[bool] = None,
) -> SelectionResult:
    """Stream ``X`` through :func:`extend_selection` ``chunk_size`` columns at a time.

    Only the current reduced set and one chunk are ever held in a Gram,
    so memory stays bounded by ``(|X_tilde| + chunk_size)^2``. Discarded
    samples keep their guarantee because the reduced set only grows.
    """

    eps = _validate_epsilon(epsilon)
    size = int(chunk_size)
    if size < 1:
        raise ConfigError(f"chunk_size must be >= 1, got {chunk_size}.")
    if size >= X.m:
        return kfsa_select(spec, X, eps, max_selected, low_memory=low_memory)

    starts = range(0, X.m, size)
    first = np.arange(0, size, dtype=np.intp)
    result = kfsa_select(spec, X.subset(first), eps, max_selected, low_memory=low_memory)
    chosen = first[result.indices]
    errors = list(result.errors_at_selection)
    final_max, truncated = result.final_max_error, result.truncated

    for start in starts[1:]:
        chunk = np.arange(start, min(start + size, X.m), dtype=np.intp)
        step = extend_selection(
            spec, X.subset(chosen), X.subset(chunk), eps, max_selected, low_memory=low_memory
        )
        lookup = np.concatenate([chosen, chunk])
        chosen = lookup[step.indices]
        errors.extend(step.errors_at_selection)
        final_max = max(final_max, step.final_max_error)
        truncated = truncated or step.truncated

    logger.info("[kfsa] chunked selection kept %d of %d samples in %d chunks", chosen.size, X.m, len(starts))
    return SelectionResult(
        selected=tuple(int(index) for index in chosen),
        errors_at_selection=tuple(errors),
        final_max_error=final_max,
        steps=int(chosen.size),
        truncated=truncated,
        epsilon=eps,
        method="kfsa",
        metadata={"chunk_size": size},
    )


__all__ = ["SelectionResult", "StepCallback", "kfsa_select", "extend_selection", "chunked_select"]
