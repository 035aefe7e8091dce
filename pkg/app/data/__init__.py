"""Dataset ingestion, preprocessing and synthetic generators."""

from .normalization import Normalizer, apply_normalizer, fit_normalizer
from .datasets import LabeledDataset, random_split, stratified_subsample, write_dataset_csv
from .mnist import (
    block_layout_14x14,
    downsample,
    downsample_and_normalize,
    load_mnist_idx,
    mnist_paths,
    prepare_mnist,
    read_idx,
    write_idx,
)
from .calcofi import load_calcofi_csv, load_table
from .fpu import DEFAULT_BETA, fpu_acceleration, generate_fpu
from .cache import load_dataset_cache, save_dataset_cache

__all__ = [
    "Normalizer",
    "fit_normalizer",
    "apply_normalizer",
    "LabeledDataset",
    "random_split",
    "stratified_subsample",
    "write_dataset_csv",
    "read_idx",
    "write_idx",
    "load_mnist_idx",
    "downsample",
    "downsample_and_normalize",
    "block_layout_14x14",
    "prepare_mnist",
    "mnist_paths",
    "load_table",
    "load_calcofi_csv",
    "DEFAULT_BETA",
    "fpu_acceleration",
    "generate_fpu",
    "save_dataset_cache",
    "load_dataset_cache",
]
