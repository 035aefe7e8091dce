"""Exception hierarchy shared by the kFSA toolkit.

The dispatcher in ``run.py`` maps the three top-level families onto
distinct exit codes, so library code should raise the most specific
subclass available.
"""

from __future__ import annotations


class KfsaError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1


class ConfigError(KfsaError):
    """Invalid experiment parameters, flags or config files."""

    exit_code = 2


class DataError(KfsaError):
    """Dataset ingestion or preprocessing failure."""

    exit_code = 3


class IdxFormatError(DataError):
    """IDX container with an unexpected magic number or dimension layout."""


class IdxTruncatedError(DataError):
    """IDX payload shorter than its header promises."""


class IdxCountMismatchError(DataError):
    """Image and label files disagree on the number of items."""


class InvalidLabelError(DataError):
    """Label outside the supported class range."""


class MissingColumnError(DataError):
    """Requested CSV column is absent from the header."""


class ParseError(DataError):
    """Unparseable numeric value; message carries row and column context."""

    def __init__(self, message: str, *, row: int | None = None, column: str | None = None) -> None:
        super().__init__(message)
        self.row = row
        self.column = column


class NumericalError(KfsaError):
    """Numerical failure inside kernels, selection or regression."""

    exit_code = 4


class DimensionMismatchError(NumericalError, ValueError):
    """Operands disagree on the ambient dimension or shape."""


class NonFiniteInputError(NumericalError, ValueError):
    """NaN or Inf encountered in sample data."""


class DegenerateKernelError(NumericalError):
    """Every diagonal kernel value is below the numerical floor."""


class SingularSystemError(NumericalError):
    """Linear system is singular beyond tolerance."""


class RankToleranceError(NumericalError):
    """Selection threshold lies below the achievable numerical rank."""


__all__ = [
    "KfsaError",
    "ConfigError",
    "DataError",
    "IdxFormatError",
    "IdxTruncatedError",
    "IdxCountMismatchError",
    "InvalidLabelError",
    "MissingColumnError",
    "ParseError",
    "NumericalError",
    "DimensionMismatchError",
    "NonFiniteInputError",
    "DegenerateKernelError",
    "SingularSystemError",
    "RankToleranceError",
]
