"""Access to Gram entries during selection.

Selection only ever needs the diagonal, a handful of full rows and the
``selected x remaining`` block. A dense source slices a precomputed
Gram matrix; the on-demand source recomputes rows from the kernel and
keeps only the rows of selected samples.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from app.config import CONFIG
from app.kernels import GramMatrix, KernelSpec, SampleMatrix, cross_values, gram, gram_nbytes

logger = logging.getLogger(__name__)


class GramSource(ABC):
    """Read-only view of ``G_{X,X}`` for a fixed sample set."""

    m: int

    @abstractmethod
    def diagonal(self) -> np.ndarray:
        """``k(x, x)`` for every sample."""

    @abstractmethod
    def rows(self, indices: Sequence[int]) -> np.ndarray:
        """Full rows ``G_{indices, X}``."""

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        cols_idx = np.asarray(cols, dtype=np.intp)
        return self.rows(rows)[:, cols_idx]

    @abstractmethod
    def row_chunks(self) -> Iterator[Tuple[int, int, np.ndarray]]:
        """Yield ``(start, stop, G[start:stop, :])`` covering every row once."""


class DenseGramSource(GramSource):
    def __init__(self, matrix: GramMatrix) -> None:
        rows, cols = matrix.shape
        if rows != cols:
            raise ValueError(f"Selection needs a square Gram matrix, got {matrix.shape}.")
        self.matrix = matrix
        self.m = rows
        self._diag = matrix.diagonal()

    def diagonal(self) -> np.ndarray:
        return self._diag

    def rows(self, indices: Sequence[int]) -> np.ndarray:
        return self.matrix.values[np.asarray(indices, dtype=np.intp), :]

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        return self.matrix.block(rows, cols)

    def row_chunks(self) -> Iterator[Tuple[int, int, np.ndarray]]:
        chunk = max(int(CONFIG.gram_chunk_rows), 1)
        for start in range(0, self.m, chunk):
            stop = min(start + chunk, self.m)
            yield start, stop, self.matrix.values[start:stop, :]


class OnDemandGramSource(GramSource):
    """Recompute kernel rows instead of holding ``m x m`` values."""

    def __init__(self, spec: KernelSpec, X: SampleMatrix, *, chunk_rows: Optional[int] = None) -> None:
        self.spec = spec
        self.X = X
        self.m = X.m
        self.chunk_rows = max(int(chunk_rows or CONFIG.gram_chunk_rows), 1)
        self._diag = spec.diagonal(X.data)
        self._cache: Dict[int, np.ndarray] = {}

    def diagonal(self) -> np.ndarray:
        return self._diag

    def rows(self, indices: Sequence[int]) -> np.ndarray:
        idx = [int(i) for i in indices]
        missing = [i for i in idx if i not in self._cache]
        if missing:
            fresh = cross_values(self.spec, self.X.data[:, missing], self.X.data)
            for position, index in enumerate(missing):
                self._cache[index] = fresh[position]
        if not idx:
            return np.empty((0, self.m), dtype=np.float64)
        return np.vstack([self._cache[i] for i in idx])

    def row_chunks(self) -> Iterator[Tuple[int, int, np.ndarray]]:
        for start in range(0, self.m, self.chunk_rows):
            stop = min(start + self.chunk_rows, self.m)
            yield start, stop, cross_values(self.spec, self.X.data[:, start:stop], self.X.data)

    def forget(self, keep: Sequence[int]) -> None:
        """Drop cached rows that are no longer needed."""
        wanted = {int(i) for i in keep}
        for index in list(self._cache):
            if index not in wanted:
                del self._cache[index]


def make_source(
    spec: KernelSpec,
    X: SampleMatrix,
    *,
    matrix: Optional[GramMatrix] = None,
    low_memory: Optional[bool] = None,
) -> GramSource:
    """Pick a dense or on-demand source for ``X``.

    ``low_memory=None`` switches to the on-demand source when the dense
    Gram would exceed ``KFSA_GRAM_BYTE_BUDGET``.
    """

    if matrix is not None:
        if matrix.shape != (X.m, X.m):
            raise ValueError(f"Precomputed Gram has shape {matrix.shape}, expected {(X.m, X.m)}.")
        return DenseGramSource(matrix)

    if low_memory is None:
        low_memory = gram_nbytes(X.m) > int(CONFIG.gram_byte_budget)
        if low_memory:
            logger.info(
                "[kfsa] dense Gram for m=%d exceeds byte budget %d; recomputing rows on demand",
                X.m,
                CONFIG.gram_byte_budget,
            )

    if low_memory:
        return OnDemandGramSource(spec, X)
    return DenseGramSource(gram(spec, X))


def as_source(G: GramMatrix | GramSource) -> GramSource:
    if isinstance(G, GramSource):
        return G
    return DenseGramSource(G)


__all__ = ["GramSource", "DenseGramSource", "OnDemandGramSource", "make_source", "as_source"]
