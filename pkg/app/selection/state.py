"""Selection state and the kernel-space primitives behind the greedy loop.

``Z`` holds ``G_{S,S}^{-1} G_{S,R}`` for the selected set ``S`` and the
remaining candidates ``R``; column ``j`` belongs to ``remaining[j]``.
The squared feature-space residual of every candidate then follows
from a Hadamard product, and adding a sample updates ``Z`` through the
Schur complement without any linear solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, pinvh

from app.errors import DegenerateKernelError, DimensionMismatchError, RankToleranceError, SingularSystemError
from app.kernels import GramMatrix, KernelSpec, SampleMatrix, as_vector, gram

from .sources import GramSource, as_source, make_source

logger = logging.getLogger(__name__)

NUMERICAL_FLOOR = 1e-14
ROUNDOFF_TOLERANCE = 1e-10


@dataclass(slots=True)
class SelectionState:
    """Mutable, single-owner bookkeeping for one selection run."""

    selected: List[int]
    remaining: np.ndarray
    Z: np.ndarray
    diag_k: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.remaining = np.asarray(self.remaining, dtype=np.intp)
        self.Z = np.asarray(self.Z, dtype=np.float64)
        if self.Z.ndim != 2:
            raise DimensionMismatchError(f"Z must be 2-D, got shape {self.Z.shape}.")
        if self.Z.shape != (len(self.selected), self.remaining.size):
            raise DimensionMismatchError(
                f"Z has shape {self.Z.shape}; expected {(len(self.selected), self.remaining.size)}."
            )

    @property
    def size(self) -> int:
        return len(self.selected)

    def position(self, index: int) -> int:
        hits = np.flatnonzero(self.remaining == index)
        if hits.size == 0:
            raise KeyError(f"Sample {index} is not a remaining candidate.")
        return int(hits[0])


def _peak(diag: np.ndarray) -> float:
    return float(np.max(diag)) if diag.size else 0.0


def numerical_floor(diag_k: np.ndarray) -> float:
    return NUMERICAL_FLOOR * max(_peak(diag_k), 0.0)


def _clamp(errors: np.ndarray, scale: float) -> np.ndarray:
    """Zero out round-off negatives; larger negatives point at a broken factorisation."""

    if errors.size:
        worst = float(np.min(errors))
        if worst < -ROUNDOFF_TOLERANCE * max(scale, 0.0):
            logger.warning(
                "[selection] residual %.3e is below the round-off band -%.1e * %.3e; clamping to zero",
                worst,
                ROUNDOFF_TOLERANCE,
                scale,
            )
    return np.maximum(errors, 0.0)


def initial_sample(
    spec: KernelSpec,
    X: SampleMatrix,
    *,
    source: Optional[GramSource] = None,
) -> int:
    """Index maximising ``sum_x' k(x, x')^2 / k(x, x)`` (lowest index on ties)."""

    src = source or make_source(spec, X)
    diag = src.diagonal()
    floor = numerical_floor(diag)
    valid = diag > floor
    if not np.any(valid) or float(np.max(diag)) <= 0.0:
        raise DegenerateKernelError(
            "Every sample has k(x, x) below the numerical floor; the kernel is degenerate on this data."
        )

    scores = np.full(src.m, -np.inf)
    for start, stop, rows in src.row_chunks():
        mass = np.einsum("ij,ij->i", rows, rows)
        window = valid[start:stop]
        scores[start:stop] = np.where(window, mass / np.where(window, diag[start:stop], 1.0), -np.inf)
    return int(np.argmax(scores))


def initial_state(source: GramSource, first: int) -> SelectionState:
    """State after picking ``first``: ``Z = G_{x0, rest} / k(x0, x0)``."""

    diag = source.diagonal()
    remaining = np.delete(np.arange(source.m, dtype=np.intp), first)
    pivot = float(diag[first])
    if pivot <= numerical_floor(diag):
        raise DegenerateKernelError(f"k(x, x) of the initial sample {first} is numerically zero.")
    Z = source.block([first], remaining) / pivot
    return SelectionState(selected=[int(first)], remaining=remaining, Z=Z, diag_k=diag)


def solve_Z(G: GramMatrix | GramSource, selected: Sequence[int], remaining: Sequence[int]) -> np.ndarray:
    """Direct Cholesky solve of ``G_{S,S} Z = G_{S,R}``."""

    source = as_source(G)
    G_ss = source.block(selected, selected)
    G_sr = source.block(selected, remaining)
    try:
        factor = cho_factor(G_ss, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise SingularSystemError(
            f"G restricted to {len(selected)} selected samples is not positive definite."
        ) from exc
    return cho_solve(factor, G_sr, check_finite=False)


def error_vector(state: SelectionState, G: GramMatrix | GramSource) -> np.ndarray:
    """Approximation errors of all remaining candidates, clamped at zero."""

    if state.remaining.size == 0:
        return np.empty(0, dtype=np.float64)
    source = as_source(G)
    G_sr = source.block(state.selected, state.remaining)
    explained = np.einsum("ij,ij->j", G_sr, state.Z)
    return _clamp(state.diag_k[state.remaining] - explained, _peak(state.diag_k))


def drop_candidates(state: SelectionState, keep: np.ndarray) -> SelectionState:
    """Restrict ``remaining`` and ``Z`` to the columns flagged in ``keep``."""

    mask = np.asarray(keep, dtype=bool)
    return replace(state, remaining=state.remaining[mask], Z=state.Z[:, mask])


def update_Z(
    state: SelectionState,
    new_index: int,
    delta_new: float,
    G: GramMatrix | GramSource,
) -> SelectionState:
    """Move ``new_index`` into the selected set and update ``Z``.

    ``delta_new`` is the Schur complement ``E(S, x_new)``; the new
    bottom row of ``Z`` is ``Lambda`` and the top block loses the rank-one
    term ``Z[:, x_new] Lambda^T``.
    """

    floor = numerical_floor(state.diag_k)
    if not np.isfinite(delta_new) or delta_new <= 0.0 or delta_new < floor:
        raise RankToleranceError(
            f"Schur complement {delta_new:.3e} is below the numerical floor {floor:.3e}; "
            "the threshold is smaller than the achievable numerical rank."
        )

    source = as_source(G)
    pos = state.position(new_index)
    g_rem = source.block([new_index], state.remaining)[0]
    g_sel = source.block([new_index], state.selected)[0]

    lam = (g_rem - g_sel @ state.Z) / delta_new
    top = state.Z - np.outer(state.Z[:, pos], lam)
    Z_new = np.delete(np.vstack([top, lam[None, :]]), pos, axis=1)

    return SelectionState(
        selected=[*state.selected, int(new_index)],
        remaining=np.delete(state.remaining, pos),
        Z=Z_new,
        diag_k=state.diag_k,
    )


def approximation_errors(spec: KernelSpec, X_tilde: SampleMatrix, X: SampleMatrix) -> np.ndarray:
    """``E(X_tilde, x) = k(x,x) - G_{x,S} G_{S,S}^{-1} G_{S,x}`` for every column of ``X``."""

    if X_tilde.d != X.d:
        raise DimensionMismatchError(f"Sample sets have different dimensions: {X_tilde.d} vs {X.d}.")
    G_ss = gram(spec, X_tilde).values
    G_sx = gram(spec, X_tilde, X).values
    try:
        factor = cho_factor(G_ss, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise SingularSystemError("Gram matrix of the reduced set is singular.") from exc
    coeffs = cho_solve(factor, G_sx, check_finite=False)
    diag = spec.diagonal(X.data)
    return _clamp(diag - np.einsum("ij,ij->j", G_sx, coeffs), _peak(diag))


def approximation_error(spec: KernelSpec, X_tilde: SampleMatrix, x: Sequence[float] | np.ndarray) -> float:
    """Squared residual of projecting ``Psi(x)`` onto ``span Psi(X_tilde)``."""

    vector = as_vector(x, label="x")
    return float(approximation_errors(spec, X_tilde, SampleMatrix(vector.reshape(-1, 1)))[0])


def pseudo_errors(G_ss: np.ndarray, G_sx: np.ndarray, diag: np.ndarray) -> np.ndarray:
    """Residuals using a pseudo-inverse (for selections that may be rank deficient)."""

    return _clamp(diag - np.einsum("ij,ij->j", G_sx, pinvh(G_ss) @ G_sx), _peak(diag))


__all__ = [
    "NUMERICAL_FLOOR",
    "SelectionState",
    "numerical_floor",
    "initial_sample",
    "initial_state",
    "solve_Z",
    "error_vector",
    "drop_candidates",
    "update_Z",
    "approximation_errors",
    "approximation_error",
    "pseudo_errors",
]
