"""Linear solvers shared by the reduced and full fits."""

from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, eigh, lstsq

from app.errors import SingularSystemError

logger = logging.getLogger(__name__)

PSEUDO_INVERSE_TOLERANCE = 1e-12


def pseudo_inverse_right(B: np.ndarray, A: np.ndarray, *, tolerance: float = PSEUDO_INVERSE_TOLERANCE) -> np.ndarray:
    """``B A^+`` for symmetric ``A`` with eigenvalues below ``tolerance * lambda_max`` dropped."""

    eigvals, eigvecs = eigh(A, check_finite=False)
    peak = float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    if peak == 0.0:
        return np.zeros((B.shape[0], A.shape[0]))
    keep = eigvals > tolerance * peak
    basis = eigvecs[:, keep]
    return ((B @ basis) / eigvals[keep]) @ basis.T


def solve_spd_right(B: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Solve ``Theta A = B`` for symmetric positive (semi)definite ``A``.

    All right-hand sides share one factorisation. Falls back to the
    truncated eigen pseudo-inverse when Cholesky fails.
    """

    try:
        factor = cho_factor(A, lower=True, check_finite=False)
    except LinAlgError:
        logger.warning("[regression] Cholesky failed on %dx%d system; using pseudo-inverse", *A.shape)
        return pseudo_inverse_right(B, A)
    return cho_solve(factor, B.T, check_finite=False).T


def least_squares_right(Y: np.ndarray, G_sx: np.ndarray) -> np.ndarray:
    """Minimum-norm ``Theta`` minimising ``||Y - Theta G_sx||_F``.

    Raises :class:`SingularSystemError` when ``G_sx`` has numerically
    dependent rows, since the reduced problem is then not uniquely solvable.
    """

    solution, _, rank, _ = lstsq(G_sx.T, Y.T, lapack_driver="gelsd", check_finite=False)
    if rank < G_sx.shape[0]:
        raise SingularSystemError(
            f"Reduced system has numerical rank {rank} < {G_sx.shape[0]}; "
            "use gamma > 0 to regularise the fit."
        )
    return np.asarray(solution).T


__all__ = ["PSEUDO_INVERSE_TOLERANCE", "pseudo_inverse_right", "solve_spd_right", "least_squares_right"]
