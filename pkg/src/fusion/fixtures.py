"""
Fixture Tables
Tab-separated vote and MAE tables that feed fusion without fitting detectors
"""

import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd

from ..detectors import LabelSeries
from ..errors import IngestionError
from ..timeseries import to_instants
from .votes import VoteMatrix

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_table(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"Fixture table not found: {path}")
    return pd.read_csv(path, sep="\t", comment="#", dtype=str, keep_default_na=False, skipinitialspace=True)


def _vote_grid(path: PathLike):
    frame = _read_table(path)
    if frame.shape[1] < 2 or frame.columns[0] != "timestamp":
        raise IngestionError(f"{path}: expected a 'timestamp' column followed by model columns")

    try:
        timestamps = to_instants(frame["timestamp"].str.strip())
    except (ValueError, TypeError) as e:
        raise IngestionError(f"{path}: unparseable timestamp: {e}") from e

    names = tuple(str(c).strip() for c in frame.columns[1:])
    votes = np.zeros((len(frame), len(names)), dtype=np.int8)
    for j, column in enumerate(frame.columns[1:]):
        for i, cell in enumerate(frame[column].str.strip()):
            if cell not in ("0", "1"):
                raise IngestionError(f"{path}: vote must be 0 or 1, got '{cell}'", row=i + 1, column=names[j])
            votes[i, j] = int(cell)

    order = np.argsort(timestamps, kind="stable")
    timestamps, votes = timestamps[order], votes[order]
    if timestamps.shape[0] > 1 and not np.all(timestamps[1:] > timestamps[:-1]):
        raise IngestionError(f"{path}: duplicate timestamp")
    return timestamps, names, votes


def load_vote_table(path: PathLike) -> VoteMatrix:
    """Read a timestamp-by-model table of 0/1 votes"""
    timestamps, names, votes = _vote_grid(path)
    matrix = VoteMatrix(timestamps, names, votes)
    logger.info(f"Loaded vote table {path}: {len(matrix)} rows, models {list(names)}")
    return matrix


def labels_from_vote_table(path: PathLike) -> Dict[str, LabelSeries]:
    """The vote table as one label series per model over the table's timestamps"""
    timestamps, names, votes = _vote_grid(path)
    return {name: LabelSeries(timestamps, votes[:, j]) for j, name in enumerate(names)}


def load_mae_table(path: PathLike) -> Dict[str, float]:
    """Read 'model<TAB>mae' rows"""
    frame = _read_table(path)
    if list(frame.columns[:2]) != ["model", "mae"]:
        raise IngestionError(f"{path}: expected columns 'model' and 'mae'")

    mae = {}
    for i, (name, value) in enumerate(zip(frame["model"].str.strip(), frame["mae"].str.strip()), start=1):
        try:
            number = float(value)
        except ValueError:
            raise IngestionError(f"{path}: mae is not a number: '{value}'", row=i, column="mae")
        if not np.isfinite(number) or number < 0:
            raise IngestionError(f"{path}: mae must be finite and >= 0, got {value}", row=i, column="mae")
        if name in mae:
            raise IngestionError(f"{path}: duplicate model '{name}'", row=i, column="model")
        mae[name] = number
    return mae
