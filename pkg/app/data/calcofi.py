"""CalCOFI-style CSV ingestion."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from app.config import CONFIG
from app.errors import DataError, MissingColumnError, ParseError
from app.kernels import SampleMatrix
from app.regression.outputs import OutputMatrix

from .datasets import LabeledDataset, Split

logger = logging.getLogger(__name__)


def _numeric_column(frame: pd.DataFrame, column: str) -> pd.Series:
    raw = frame[column]
    values = pd.to_numeric(raw, errors="coerce")
    bad = values.isna() & raw.notna() & (raw.astype(str).str.strip() != "")
    if bad.any():
        position = int(np.flatnonzero(bad.to_numpy())[0])
        # +2: header line and 1-based numbering.
        line = position + 2
        raise ParseError(
            f"Column '{column}' has unparseable value {raw.iloc[position]!r} on line {line}.",
            row=line,
            column=column,
        )
    return values


def load_table(
    path: str | Path,
    feature_columns: Sequence[str],
    target_columns: Sequence[str],
    *,
    split: Split = "train",
    encoding: str = "utf-8",
) -> LabeledDataset:
    """Numeric table with named feature and target columns.

    Rows missing any selected value are dropped; the count is kept in
    ``metadata["dropped_rows"]``.
    """

    features, targets = list(feature_columns), list(target_columns)
    if not features or not targets:
        raise DataError("A table needs at least one feature and one target column.")
    wanted = [*features, *targets]

    source = Path(path)
    try:
        header = pd.read_csv(source, nrows=0, encoding=encoding).columns
    except FileNotFoundError as exc:
        raise DataError(f"CSV file not found: {source}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataError(f"Could not read CSV header of {source}: {exc}") from exc

    missing = [column for column in wanted if column not in header]
    if missing:
        raise MissingColumnError(f"{source} lacks column(s) {missing}; available: {list(header)[:20]}")

    try:
        frame = pd.read_csv(source, usecols=wanted, dtype=str, encoding=encoding)
    except pd.errors.ParserError as exc:
        raise ParseError(f"Malformed CSV {source}: {exc}") from exc

    numeric = pd.DataFrame({column: _numeric_column(frame, column) for column in wanted})
    complete = numeric.dropna()
    dropped = int(len(numeric) - len(complete))
    if complete.empty:
        raise DataError(f"{source} has no rows with all of {wanted} present.")

    logger.info("[data] read %d rows from %s, dropped %d with missing values", len(complete), source, dropped)
    return LabeledDataset(
        X=SampleMatrix.from_rows(complete[features].to_numpy(dtype=np.float64)),
        Y=OutputMatrix(complete[targets].to_numpy(dtype=np.float64).T),
        split=split,
        metadata={"source": str(source), "dropped_rows": dropped, "inputs": features, "outputs": targets},
    )


def load_calcofi_csv(
    path: str | Path,
    input_columns: Optional[Sequence[str]] = None,
    output_column: Optional[str] = None,
    *,
    split: Split = "train",
    encoding: str = "utf-8",
) -> LabeledDataset:
    """Depth, pressure, temperature and salinity against dissolved oxygen.

    Column names default to ``KFSA_CALCOFI_INPUTS`` / ``KFSA_CALCOFI_OUTPUT``.
    """

    inputs = list(input_columns or CONFIG.calcofi_inputs)
    output = output_column or CONFIG.calcofi_output
    return load_table(path, inputs, [output], split=split, encoding=encoding)


__all__ = ["load_table", "load_calcofi_csv"]
