"""Kernel specifications.

Every kernel exposes a scalar ``evaluate`` used by :func:`kernel_eval`
and a vectorised ``cross`` used for Gram construction. Both operate on
plain float64 arrays; validation happens in :mod:`app.kernels.gram`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Type

import numpy as np
from scipy.spatial.distance import cdist

from app.errors import ConfigError


class KernelSpec(ABC):
    """Base class for immutable kernel descriptions."""

    kind: ClassVar[str]
    kappa: float

    @abstractmethod
    def evaluate(self, x: np.ndarray, y: np.ndarray) -> float:
        """Scalar kernel value for two 1-D samples."""

    @abstractmethod
    def cross(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Kernel values between the columns of ``A`` (d x m) and ``B`` (d x n)."""

    def diagonal(self, A: np.ndarray) -> np.ndarray:
        """``k(x, x)`` for every column of ``A``."""
        return np.ones(A.shape[1], dtype=np.float64)

    @property
    def min_dimension(self) -> int:
        """Smallest ambient dimension the kernel can be evaluated on."""
        return 1

    @property
    def is_normalized(self) -> bool:
        """True when ``k(x, x) == 1`` for every sample."""
        return True

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """JSON/YAML-friendly representation."""

    def describe(self) -> str:
        params = ", ".join(f"{key}={value}" for key, value in self.to_dict().items() if key != "kind")
        return f"{self.kind}({params})"


@dataclass(frozen=True, slots=True)
class GaussianKernel(KernelSpec):
    """``exp(-kappa * ||x - x'||^2)``."""

    kappa: float
    kind: ClassVar[str] = "gaussian"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ConfigError(f"Gaussian kernel requires kappa > 0, got {self.kappa}.")

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> float:
        diff = x - y
        return float(np.exp(-self.kappa * float(np.dot(diff, diff))))

    def cross(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        sq = cdist(A.T, B.T, metric="sqeuclidean")
        return np.exp(-self.kappa * sq)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "kappa": float(self.kappa)}


@dataclass(frozen=True, slots=True)
class PolynomialKernel(KernelSpec):
    """``(kappa + x^T x')^q``; ``kappa = 0`` gives the homogeneous kernel."""

    kappa: float = 1.0
    degree: int = 3
    kind: ClassVar[str] = "polynomial"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise ConfigError(f"Polynomial kernel requires kappa >= 0, got {self.kappa}.")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ConfigError(f"Polynomial kernel requires an integer degree >= 1, got {self.degree}.")
        object.__setattr__(self, "degree", int(self.degree))

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> float:
        return float((self.kappa + float(np.dot(x, y))) ** self.degree)

    def cross(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return (self.kappa + A.T @ B) ** self.degree

    def diagonal(self, A: np.ndarray) -> np.ndarray:
        return (self.kappa + np.einsum("ij,ij->j", A, A)) ** self.degree

    @property
    def is_normalized(self) -> bool:
        return False

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "kappa": float(self.kappa), "degree": int(self.degree)}


def _validate_pixels(pixels: Iterable[int], *, label: str) -> Tuple[int, ...]:
    values = tuple(int(p) for p in pixels)
    if not values:
        raise ConfigError(f"{label} must contain at least one pixel index.")
    if any(p < 0 for p in values):
        raise ConfigError(f"{label} contains negative pixel indices.")
    if len(set(values)) != len(values):
        raise ConfigError(f"{label} contains duplicate pixel indices.")
    return values


def _cosine_product(kappa: float, pixels: Sequence[int], A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.ones((A.shape[1], B.shape[1]), dtype=np.float64)
    for pixel in pixels:
        out *= np.cos(kappa * (A[pixel][:, None] - B[pixel][None, :]))
    return out


@dataclass(frozen=True, slots=True)
class CosineProductKernel(KernelSpec):
    """``prod_j cos(kappa * (x_{i_j} - x'_{i_j}))`` over a pixel subset."""

    kappa: float
    pixels: Tuple[int, ...]
    kind: ClassVar[str] = "cosine"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ConfigError(f"Cosine-product kernel requires kappa > 0, got {self.kappa}.")
        object.__setattr__(self, "pixels", _validate_pixels(self.pixels, label="pixel list"))

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> float:
        idx = np.asarray(self.pixels, dtype=np.intp)
        return float(np.prod(np.cos(self.kappa * (x[idx] - y[idx]))))

    def cross(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return _cosine_product(self.kappa, self.pixels, A, B)

    @property
    def min_dimension(self) -> int:
        return max(self.pixels) + 1

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "kappa": float(self.kappa), "pixels": list(self.pixels)}


def combine_block_values(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """``(prod_j (G_j + 1) - 1) / (2^B - 1)`` with elementwise products."""
    if not blocks:
        raise ValueError("At least one block Gram is required.")
    if len(blocks) == 1:
        return np.array(blocks[0], dtype=np.float64, copy=True)
    acc = np.asarray(blocks[0], dtype=np.float64) + 1.0
    for values in blocks[1:]:
        acc *= np.asarray(values, dtype=np.float64) + 1.0
    acc -= 1.0
    acc /= float(2 ** len(blocks) - 1)
    return acc


@dataclass(frozen=True, slots=True)
class BlockCompositeKernel(KernelSpec):
    """Normalised sum over all non-empty products of per-block cosine kernels."""

    kappa: float
    blocks: Tuple[Tuple[int, ...], ...]
    kind: ClassVar[str] = "composite"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ConfigError(f"Block-composite kernel requires kappa > 0, got {self.kappa}.")
        if not self.blocks:
            raise ConfigError("Block-composite kernel needs at least one block.")
        blocks = tuple(_validate_pixels(block, label=f"block {i}") for i, block in enumerate(self.blocks))
        seen: set[int] = set()
        for block in blocks:
            overlap = seen.intersection(block)
            if overlap:
                raise ConfigError(f"Blocks must be disjoint; pixel(s) {sorted(overlap)} repeat.")
            seen.update(block)
        object.__setattr__(self, "blocks", blocks)

    def block_kernels(self) -> Tuple[CosineProductKernel, ...]:
        return tuple(CosineProductKernel(self.kappa, block) for block in self.blocks)

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> float:
        values = [np.array([[kernel.evaluate(x, y)]]) for kernel in self.block_kernels()]
        return float(combine_block_values(values)[0, 0])

    def cross(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return combine_block_values([_cosine_product(self.kappa, block, A, B) for block in self.blocks])

    @property
    def min_dimension(self) -> int:
        return max(max(block) for block in self.blocks) + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "kappa": float(self.kappa),
            "blocks": [list(block) for block in self.blocks],
        }


_KERNELS: Dict[str, Type[KernelSpec]] = {
    GaussianKernel.kind: GaussianKernel,
    PolynomialKernel.kind: PolynomialKernel,
    CosineProductKernel.kind: CosineProductKernel,
    BlockCompositeKernel.kind: BlockCompositeKernel,
}


def kernel_from_dict(payload: Mapping[str, Any]) -> KernelSpec:
    """Inverse of :meth:`KernelSpec.to_dict`."""
    kind = str(payload.get("kind") or "").strip().casefold()
    kernel_cls = _KERNELS.get(kind)
    if kernel_cls is None:
        raise ConfigError(f"Unknown kernel kind '{kind}'. Expected one of {sorted(_KERNELS)}.")
    params = {key: value for key, value in payload.items() if key != "kind"}
    if "pixels" in params:
        params["pixels"] = tuple(params["pixels"])
    if "blocks" in params:
        params["blocks"] = tuple(tuple(block) for block in params["blocks"])
    try:
        return kernel_cls(**params)
    except TypeError as exc:
        raise ConfigError(f"Invalid parameters for {kind} kernel: {exc}") from exc


def build_kernel(
    kind: str,
    kappa: float,
    *,
    degree: int = 3,
    pixels: Optional[Sequence[int]] = None,
    blocks: Optional[Sequence[Sequence[int]]] = None,
) -> KernelSpec:
    """Construct a kernel from CLI-style parameters."""
    payload: Dict[str, Any] = {"kind": kind, "kappa": kappa}
    normalized = kind.strip().casefold()
    if normalized == PolynomialKernel.kind:
        payload["degree"] = degree
    elif normalized == CosineProductKernel.kind:
        if pixels is None:
            raise ConfigError("Cosine-product kernel requires a pixel list.")
        payload["pixels"] = list(pixels)
    elif normalized == BlockCompositeKernel.kind:
        if blocks is None:
            raise ConfigError("Block-composite kernel requires a block layout.")
        payload["blocks"] = [list(block) for block in blocks]
    return kernel_from_dict(payload)


__all__ = [
    "KernelSpec",
    "GaussianKernel",
    "PolynomialKernel",
    "CosineProductKernel",
    "BlockCompositeKernel",
    "combine_block_values",
    "kernel_from_dict",
    "build_kernel",
]
