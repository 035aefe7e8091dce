"""
Kernel functions and Gram matrices.

Kernels are immutable specs; :func:`gram` materialises dense float64
Gram matrices which the selection and regression packages slice.
"""

from .gram import composite_gram, cross_values, gram, gram_nbytes, kernel_eval
from .samples import GramMatrix, SampleMatrix, as_vector, ensure_samples
from .specs import (
    BlockCompositeKernel,
    CosineProductKernel,
    GaussianKernel,
    KernelSpec,
    PolynomialKernel,
    build_kernel,
    combine_block_values,
    kernel_from_dict,
)

__all__ = [
    "SampleMatrix",
    "GramMatrix",
    "as_vector",
    "ensure_samples",
    "KernelSpec",
    "GaussianKernel",
    "PolynomialKernel",
    "CosineProductKernel",
    "BlockCompositeKernel",
    "build_kernel",
    "combine_block_values",
    "kernel_from_dict",
    "kernel_eval",
    "cross_values",
    "gram",
    "composite_gram",
    "gram_nbytes",
]
