"""
CSV ingestion for multichannel sensor data
"""

import logging
import os
from typing import Optional

import numpy as np
import pandas as pd

from ..errors import IngestionError
from .series import TimeSeries

logger = logging.getLogger(__name__)


def load_csv(path: str, timestamp_column: Optional[str] = None) -> TimeSeries:
    """
    Load a header-row CSV into a TimeSeries sorted by timestamp

    Args:
        path: CSV file (UTF-8, comma separated)
        timestamp_column: name of the ISO-8601 timestamp column; the first column when omitted

    Returns:
        TimeSeries with empty cells kept as NaN (missing)
    """
    if not os.path.exists(path):
        raise IngestionError(f"Input file not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, UnicodeDecodeError, pd.errors.EmptyDataError) as e:
        raise IngestionError(f"Cannot parse CSV {path}: {e}") from e

    if frame.empty or frame.shape[1] < 2:
        raise IngestionError(f"CSV {path} needs a timestamp column and at least one channel")

    if timestamp_column is None:
        timestamp_column = frame.columns[0]
    if timestamp_column not in frame.columns:
        raise IngestionError(f"Timestamp column not found in {path}", column=timestamp_column)

    # data rows are reported 1-based, header excluded
    raw_stamps = frame[timestamp_column].str.strip()
    stamps = pd.to_datetime(raw_stamps, format="ISO8601", errors="coerce")
    bad = stamps.isna().to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        raise IngestionError(
            f"Unparseable timestamp '{raw_stamps.iloc[row - 1]}'", row=row, column=timestamp_column
        )
    if getattr(stamps.dt, "tz", None) is not None:
        stamps = stamps.dt.tz_convert(None)

    channels = [c for c in frame.columns if c != timestamp_column]
    values = np.empty((len(frame), len(channels)), dtype=np.float64)
    for j, column in enumerate(channels):
        cells = frame[column].str.strip()
        numeric = pd.to_numeric(cells, errors="coerce")
        invalid = (numeric.isna() & (cells != "")).to_numpy()
        if invalid.any():
            row = int(np.flatnonzero(invalid)[0]) + 1
            raise IngestionError(f"Non-numeric cell '{cells.iloc[row - 1]}'", row=row, column=column)
        values[:, j] = numeric.to_numpy(dtype=np.float64)

    instants = np.asarray(stamps, dtype="datetime64[ns]").astype("datetime64[ms]")
    order = np.argsort(instants, kind="stable")
    instants = instants[order]
    values = values[order]

    duplicated = np.flatnonzero(instants[1:] == instants[:-1])
    if duplicated.size:
        row = int(order[duplicated[0] + 1]) + 1
        raise IngestionError(f"Duplicate timestamp {instants[duplicated[0]]}", row=row, column=timestamp_column)

    missing = int(np.isnan(values).sum())
    logger.info(f"Loaded {len(instants)} rows x {len(channels)} channels from {path} ({missing} missing cells)")
    return TimeSeries(timestamps=instants, channels=tuple(channels), values=values)
