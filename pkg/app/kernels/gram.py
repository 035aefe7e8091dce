"""Kernel evaluation and Gram-matrix construction."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from app.config import CONFIG
from app.errors import DimensionMismatchError

from .samples import GramMatrix, SampleMatrix, as_vector
from .specs import KernelSpec, combine_block_values

logger = logging.getLogger(__name__)


def _check_dimension(spec: KernelSpec, d: int) -> None:
    if d < spec.min_dimension:
        raise DimensionMismatchError(
            f"{spec.describe()} needs samples of dimension >= {spec.min_dimension}, got {d}."
        )


def _canonical_pair(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Byte order comparison keeps k(x, y) and k(y, x) bit-identical.
    if x.tobytes() <= y.tobytes():
        return x, y
    return y, x


def kernel_eval(spec: KernelSpec, x: Sequence[float] | np.ndarray, x_prime: Sequence[float] | np.ndarray) -> float:
    """Evaluate ``k(x, x')`` for two single samples."""

    a = as_vector(x, label="x")
    b = as_vector(x_prime, label="x'")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Samples have different dimensions: {a.shape[0]} vs {b.shape[0]}.")
    _check_dimension(spec, a.shape[0])
    first, second = _canonical_pair(a, b)
    return spec.evaluate(first, second)


def _fill_rows(spec: KernelSpec, A: np.ndarray, B: np.ndarray, out: np.ndarray, start: int, stop: int) -> None:
    out[start:stop, :] = spec.cross(A[:, start:stop], B)


def cross_values(
    spec: KernelSpec,
    A: np.ndarray,
    B: np.ndarray,
    *,
    chunk_rows: Optional[int] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Raw ``len(A) x len(B)`` kernel values computed in independent row blocks."""

    m, n = A.shape[1], B.shape[1]
    chunk = max(int(chunk_rows or CONFIG.gram_chunk_rows), 1)
    pool_size = max(int(workers or CONFIG.gram_workers), 1)
    out = np.empty((m, n), dtype=np.float64)
    bounds = [(start, min(start + chunk, m)) for start in range(0, m, chunk)]

    if pool_size == 1 or len(bounds) == 1:
        for start, stop in bounds:
            _fill_rows(spec, A, B, out, start, stop)
        return out

    with ThreadPoolExecutor(max_workers=pool_size) as pool:
        futures = [pool.submit(_fill_rows, spec, A, B, out, start, stop) for start, stop in bounds]
        for future in futures:
            future.result()
    return out


def gram(
    spec: KernelSpec,
    X: SampleMatrix,
    X_prime: Optional[SampleMatrix] = None,
    *,
    chunk_rows: Optional[int] = None,
    workers: Optional[int] = None,
) -> GramMatrix:
    """Gram matrix ``G_{X,X'}`` with ``values[i, j] = k(X[:, i], X'[:, j])``.

    When ``X'`` is omitted (or is the same sample set) the upper triangle
    is mirrored so the result is exactly symmetric.
    """

    right = X if X_prime is None else X_prime
    if right.d != X.d:
        raise DimensionMismatchError(f"Sample sets have different dimensions: {X.d} vs {right.d}.")
    _check_dimension(spec, X.d)

    values = cross_values(spec, X.data, right.data, chunk_rows=chunk_rows, workers=workers)
    same = right is X or right.fingerprint == X.fingerprint
    if same:
        upper = np.triu(values)
        values = upper + np.triu(values, 1).T

    logger.debug("[gram] %s %dx%d (%s)", spec.kind, values.shape[0], values.shape[1], "self" if same else "cross")
    values.setflags(write=False)
    return GramMatrix(values, left_set=X.fingerprint, right_set=right.fingerprint)


def composite_gram(base_grams: Sequence[GramMatrix]) -> GramMatrix:
    """Combine ``B`` block Grams as ``(prod_j (G_j + 1) - 1) / (2^B - 1)``."""

    if not base_grams:
        raise ValueError("composite_gram needs at least one base Gram matrix.")
    shape = base_grams[0].shape
    for index, item in enumerate(base_grams[1:], start=1):
        if item.shape != shape:
            raise DimensionMismatchError(f"Base Gram {index} has shape {item.shape}, expected {shape}.")

    values = combine_block_values([item.values for item in base_grams])
    values.setflags(write=False)
    return GramMatrix(values, left_set=base_grams[0].left_set, right_set=base_grams[0].right_set)


def gram_nbytes(m: int, n: Optional[int] = None) -> int:
    """Bytes needed by a dense float64 ``m x n`` Gram matrix."""
    return 8 * int(m) * int(n if n is not None else m)


__all__ = ["kernel_eval", "cross_values", "gram", "composite_gram", "gram_nbytes"]
