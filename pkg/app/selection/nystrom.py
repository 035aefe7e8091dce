"""Nyström column-sampling baselines.

Two strategies are offered for comparison with kFSA: uniform sampling
without replacement and sampling proportional to exact ridge leverage
scores ``diag(G (G + lambda I)^{-1})``. Scores come from a dense
eigendecomposition, which is fine at desk scale.
"""

from __future__ import annotations

import logging
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.linalg import eigh, pinvh

from app.errors import ConfigError, DegenerateKernelError
from app.kernels import GramMatrix, KernelSpec, SampleMatrix, gram as build_gram

from .kfsa import SelectionResult
from .state import pseudo_errors

logger = logging.getLogger(__name__)

Strategy = Literal["uniform", "leverage"]
STRATEGIES: tuple[str, ...] = ("uniform", "leverage")
DEFAULT_RIDGE_SCALE = 1e-6


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator used by every sampling routine."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def default_ridge(G: GramMatrix | np.ndarray) -> float:
    values = G.values if isinstance(G, GramMatrix) else np.asarray(G)
    trace = float(np.trace(values))
    if trace <= 0:
        raise DegenerateKernelError("Gram matrix has non-positive trace; leverage scores are undefined.")
    return DEFAULT_RIDGE_SCALE * trace / values.shape[0]


def ridge_leverage_scores(G: GramMatrix | np.ndarray, ridge: Optional[float] = None) -> np.ndarray:
    """Exact ridge leverage scores of a symmetric PSD Gram matrix."""

    values = G.values if isinstance(G, GramMatrix) else np.asarray(G, dtype=np.float64)
    lam = default_ridge(values) if ridge is None else float(ridge)
    if lam <= 0:
        raise ConfigError(f"Leverage ridge must be > 0, got {ridge}.")
    eigvals, eigvecs = eigh(values, check_finite=False)
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs**2) @ (eigvals / (eigvals + lam))


def _sample(rng: np.random.Generator, m: int, budget: int, weights: Optional[np.ndarray]) -> np.ndarray:
    if weights is None:
        return rng.choice(m, size=budget, replace=False)
    p = np.clip(weights, 0.0, None)
    if np.count_nonzero(p) < budget:
        # choice() without replacement needs enough non-zero weights.
        p = p + np.finfo(np.float64).tiny * max(float(p.max()), 1.0)
    return rng.choice(m, size=budget, replace=False, p=p / p.sum())


def nystrom_select(
    spec: KernelSpec,
    X: SampleMatrix,
    budget: int,
    strategy: Strategy = "uniform",
    *,
    ridge: Optional[float] = None,
    seed: int = 0,
    gram: Optional[GramMatrix] = None,
) -> SelectionResult:
    """Sample ``budget`` landmark columns; deterministic for a fixed ``seed``."""

    if strategy not in STRATEGIES:
        raise ConfigError(f"Unknown Nyström strategy '{strategy}'. Expected one of {list(STRATEGIES)}.")
    count = int(budget)
    if not 1 <= count <= X.m:
        raise ConfigError(f"Nyström budget must lie in [1, {X.m}], got {budget}.")

    G = gram if gram is not None else build_gram(spec, X)
    if count == X.m:
        chosen = np.arange(X.m, dtype=np.intp)
    else:
        weights = ridge_leverage_scores(G, ridge) if strategy == "leverage" else None
        chosen = np.sort(_sample(make_rng(seed), X.m, count, weights)).astype(np.intp)

    rest = np.setdiff1d(np.arange(X.m), chosen)
    if rest.size:
        residuals = pseudo_errors(G.block(chosen, chosen), G.block(chosen, rest), G.diagonal()[rest])
        worst = float(residuals.max())
    else:
        worst = 0.0

    logger.info("[nystrom] %s sampled %d of %d columns (seed=%d)", strategy, count, X.m, seed)
    return SelectionResult(
        selected=tuple(int(i) for i in chosen),
        errors_at_selection=(),
        final_max_error=worst,
        steps=count,
        truncated=False,
        epsilon=None,
        method=f"nystrom-{strategy}",
        metadata={"seed": int(seed)},
    )


def nystrom_residual(
    spec: KernelSpec,
    X: SampleMatrix,
    selected: Sequence[int],
    *,
    gram: Optional[GramMatrix] = None,
) -> float:
    """``||G - G_{X,S} G_{S,S}^+ G_{S,X}||_F``."""

    idx = np.asarray(list(selected), dtype=np.intp)
    if idx.size == 0:
        raise ConfigError("nystrom_residual needs at least one selected index.")
    G = gram if gram is not None else build_gram(spec, X)
    G_sx = G.values[idx, :]
    approx = G_sx.T @ pinvh(G.block(idx, idx)) @ G_sx
    return float(np.linalg.norm(G.values - approx, ord="fro"))


__all__ = [
    "STRATEGIES",
    "Strategy",
    "make_rng",
    "default_ridge",
    "ridge_leverage_scores",
    "nystrom_select",
    "nystrom_residual",
]
