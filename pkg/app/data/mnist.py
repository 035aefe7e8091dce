"""MNIST IDX files, downsampling and the 14x14 block layout.

IDX layout: a 4-byte big-endian magic (two zero bytes, a type code and
the number of dimensions), one big-endian uint32 per dimension, then
the row-major payload. Files may be gzip compressed.
"""

from __future__ import annotations

import gzip
import logging
import struct
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from app.config import CONFIG
from app.errors import DataError, IdxCountMismatchError, IdxFormatError, IdxTruncatedError
from app.kernels import SampleMatrix, ensure_samples
from app.regression.outputs import one_hot

from .datasets import LabeledDataset, Split

logger = logging.getLogger(__name__)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
UBYTE_TYPE = 0x08
GZIP_SIGNATURE = b"\x1f\x8b"

SIDE = 28
SMALL_SIDE = 14
BLOCK = 4


def _read_bytes(path: Path) -> bytes:
    try:
        raw = path.read_bytes()
    except FileNotFoundError as exc:
        raise DataError(f"IDX file not found: {path}") from exc
    if raw[:2] == GZIP_SIGNATURE:
        try:
            return gzip.decompress(raw)
        except (OSError, EOFError) as exc:
            raise IdxTruncatedError(f"{path} is a damaged gzip stream: {exc}") from exc
    return raw


def read_idx(path: str | Path, expected_magic: Optional[int] = None) -> np.ndarray:
    """Decode an unsigned-byte IDX file into an array of its declared shape."""

    source = Path(path)
    raw = _read_bytes(source)
    if len(raw) < 4:
        raise IdxTruncatedError(f"{source} is too short to hold an IDX header.")

    (magic,) = struct.unpack(">I", raw[:4])
    if expected_magic is not None and magic != expected_magic:
        raise IdxFormatError(f"{source} has magic 0x{magic:08x}, expected 0x{expected_magic:08x}.")
    if magic >> 16 != 0 or (magic >> 8) & 0xFF != UBYTE_TYPE:
        raise IdxFormatError(f"{source} has unsupported IDX magic 0x{magic:08x}.")

    ndim = magic & 0xFF
    header_size = 4 + 4 * ndim
    if ndim == 0:
        raise IdxFormatError(f"{source} declares zero dimensions.")
    if len(raw) < header_size:
        raise IdxTruncatedError(f"{source} ends inside its dimension header.")
    shape = struct.unpack(f">{ndim}I", raw[4:header_size])

    expected = int(np.prod(shape, dtype=np.int64))
    payload = raw[header_size:]
    if len(payload) < expected:
        raise IdxTruncatedError(f"{source} holds {len(payload)} payload bytes, header promises {expected}.")
    if len(payload) > expected:
        logger.warning("[mnist] %s has %d trailing bytes after the payload", source, len(payload) - expected)
    return np.frombuffer(payload, dtype=np.uint8, count=expected).reshape(shape)


def write_idx(path: str | Path, array: np.ndarray) -> Path:
    """Write a uint8 array as IDX (gzip compressed when the name ends in ``.gz``)."""

    values = np.asarray(array)
    if values.dtype != np.uint8:
        raise IdxFormatError(f"Only uint8 arrays can be written as IDX, got {values.dtype}.")
    if values.ndim < 1 or values.ndim > 255:
        raise IdxFormatError(f"IDX supports 1 to 255 dimensions, got {values.ndim}.")
    header = struct.pack(">I", (UBYTE_TYPE << 8) | values.ndim)
    header += struct.pack(f">{values.ndim}I", *values.shape)
    blob = header + np.ascontiguousarray(values).tobytes()

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(gzip.compress(blob) if target.suffix == ".gz" else blob)
    return target


def load_mnist_idx(images_path: str | Path, labels_path: str | Path, *, split: Split = "train") -> LabeledDataset:
    """Images become 784-vectors in ``[0, 1]`` (one column each), labels one-hot."""

    images = read_idx(images_path, IMAGES_MAGIC)
    labels = read_idx(labels_path, LABELS_MAGIC)
    if images.ndim != 3:
        raise IdxFormatError(f"{images_path} should hold a 3-D image stack, got shape {images.shape}.")
    if labels.ndim != 1:
        raise IdxFormatError(f"{labels_path} should hold a 1-D label vector, got shape {labels.shape}.")
    if images.shape[0] != labels.shape[0]:
        raise IdxCountMismatchError(
            f"{images_path} has {images.shape[0]} images but {labels_path} has {labels.shape[0]} labels."
        )

    count, rows, cols = images.shape
    X = images.reshape(count, rows * cols).T.astype(np.float64) / 255.0
    dataset = LabeledDataset(
        X=SampleMatrix(X),
        Y=one_hot(labels.astype(np.int64), num_classes=10),
        split=split,
        metadata={"source": str(images_path), "image_shape": [rows, cols]},
    )
    logger.info("[mnist] loaded %d %s images of %dx%d", count, split, rows, cols)
    return dataset


def downsample(images: SampleMatrix | np.ndarray) -> np.ndarray:
    """Average non-overlapping 2x2 blocks: 784-vectors become 196-vectors."""

    samples = ensure_samples(images)
    if samples.d != SIDE * SIDE:
        raise DataError(f"Downsampling expects 784-pixel images, got d={samples.d}.")
    stack = samples.data.T.reshape(samples.m, SMALL_SIDE, 2, SMALL_SIDE, 2)
    return stack.mean(axis=(2, 4)).reshape(samples.m, SMALL_SIDE * SMALL_SIDE).T


def downsample_and_normalize(images: SampleMatrix | np.ndarray) -> SampleMatrix:
    """Downsample to 14x14 and scale each image so its largest pixel is 1."""

    small = downsample(images)
    peaks = small.max(axis=0)
    # All-zero images stay zero.
    scale = np.where(peaks > 0, peaks, 1.0)
    return SampleMatrix(small / scale[None, :])


def block_layout_14x14() -> List[List[int]]:
    """Nine disjoint 4x4 blocks covering the 12x12 core; the 1-pixel frame is ignored."""

    blocks: List[List[int]] = []
    for bi in range(3):
        for bj in range(3):
            top, left = 1 + BLOCK * bi, 1 + BLOCK * bj
            blocks.append(
                [r * SMALL_SIDE + c for r in range(top, top + BLOCK) for c in range(left, left + BLOCK)]
            )
    return blocks


def prepare_mnist(dataset: LabeledDataset) -> LabeledDataset:
    return dataset.with_samples(downsample_and_normalize(dataset.X))


def _find(directory: Path, stem: str) -> Path:
    for name in (stem, f"{stem}.gz", stem.replace("-idx", ".idx"), f"{stem.replace('-idx', '.idx')}.gz"):
        candidate = directory / name
        if candidate.exists():
            return candidate
    raise DataError(f"No MNIST file named like '{stem}' under {directory}.")


def mnist_paths(directory: str | Path | None = None, split: Split = "train") -> Tuple[Path, Path]:
    """Locate the standard image/label files for ``split`` under ``directory``."""

    root = Path(directory) if directory is not None else Path(CONFIG.data_dir) / "mnist"
    prefix = "train" if split == "train" else "t10k"
    return _find(root, f"{prefix}-images-idx3-ubyte"), _find(root, f"{prefix}-labels-idx1-ubyte")


__all__ = [
    "IMAGES_MAGIC",
    "LABELS_MAGIC",
    "read_idx",
    "write_idx",
    "load_mnist_idx",
    "downsample",
    "downsample_and_normalize",
    "block_layout_14x14",
    "prepare_mnist",
    "mnist_paths",
]
