"""
kFSA Application Package

This package contains the kernel feature space selection toolkit:
- kernels: Kernel specs, sample containers and Gram matrices
- selection: Greedy kFSA selection and Nyström baselines
- regression: Reduced-set and full-set kernel ridge regression
- features: Explicit polynomial feature maps and coefficient recovery
- data: MNIST, CalCOFI and FPU datasets
- experiments: Grid runs and result tables behind run.py
- worker: Celery fan-out of grid points
- tests: Test suites
"""

__version__ = "0.1.0"
