"""
Time Series Preprocessing
Resampling, gap filling, leakage-safe z-score normalization and chronological splitting
"""

import logging
from dataclasses import dataclass
from datetime import timedelta
from typing import Tuple, Union

import numpy as np
import pandas as pd

from ..errors import ConfigError, DataError
from .series import NormalizationStats, SplitSpec, TimeSeries

logger = logging.getLogger(__name__)

AGGREGATORS = ("mean",)

Interval = Union[str, timedelta, pd.Timedelta]


def fill_missing(series: TimeSeries) -> TimeSeries:
    """Forward-fill missing cells; rows before the first complete row are dropped"""
    frame = series.to_frame().replace([np.inf, -np.inf], np.nan).ffill()
    complete = frame.notna().all(axis=1).to_numpy()
    if not complete.any():
        raise DataError("No row has a value for every channel after forward-fill")

    first = int(np.argmax(complete))
    if first:
        logger.warning(f"Dropped {first} leading rows without a value for every channel")
    return TimeSeries.from_frame(frame.iloc[first:])


def resample(series: TimeSeries, interval: Interval, aggregator: str = "mean") -> TimeSeries:
    """
    Aggregate a series onto a uniform grid anchored at its first timestamp

    Each output row covers [t0 + i*interval, t0 + (i+1)*interval); empty buckets
    take the previous output row, leading incomplete rows are dropped.
    """
    if aggregator not in AGGREGATORS:
        raise ConfigError(f"Unsupported aggregator '{aggregator}', expected one of {AGGREGATORS}")
    step = pd.Timedelta(interval)
    if step <= pd.Timedelta(0):
        raise ConfigError(f"Resample interval must be positive, got {interval}")
    if series.n == 0:
        raise DataError("Cannot resample an empty series")

    frame = series.to_frame()
    grid = frame.resample(step, origin="start", label="left", closed="left").agg(aggregator)
    empty = int(grid.isna().all(axis=1).sum())
    if empty:
        logger.debug(f"{empty} empty buckets forward-filled at interval {step}")

    resampled = fill_missing(TimeSeries.from_frame(grid))
    logger.info(f"Resampled {series.n} rows to {resampled.n} rows at interval {step}")
    return resampled


def zscore_fit(train: TimeSeries) -> NormalizationStats:
    """Per-channel population mean and standard deviation of the training rows"""
    if train.n == 0:
        raise DataError("Cannot fit normalization on an empty training set")
    if not train.is_finite():
        raise DataError("Training rows contain missing or non-finite values")

    values = train.values
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std[np.ptp(values, axis=0) == 0] = 0.0

    constant = [c for c, s in zip(train.channels, std) if s == 0]
    if constant:
        logger.warning(f"Constant channels map to 0 after normalization: {constant}")
    return NormalizationStats(channels=train.channels, mean=mean, std=std)


def zscore_apply(series: TimeSeries, stats: NormalizationStats) -> TimeSeries:
    """(x - mean) / std per channel; constant channels map to 0"""
    if tuple(series.channels) != tuple(stats.channels):
        raise DataError(f"Channel mismatch: series has {list(series.channels)}, stats have {list(stats.channels)}")

    scale = np.where(stats.constant_channel, 1.0, stats.std)
    normalized = (series.values - stats.mean) / scale
    normalized[:, stats.constant_channel] = 0.0
    return series.with_values(normalized)


def split(series: TimeSeries, spec: SplitSpec) -> Tuple[TimeSeries, TimeSeries, TimeSeries]:
    """
    Extract the validation interval, then split the remainder chronologically

    Returns:
        (train, test, validation); train precedes test and neither overlaps validation
    """
    if spec.validation_range is not None:
        start, end = spec.validation_range
        held_out = (series.timestamps >= start) & (series.timestamps < end)
    else:
        held_out = np.zeros(series.n, dtype=bool)

    validation = series.take(held_out)
    remainder = series.take(~held_out)
    n_train = spec.train_count(remainder.n)
    if n_train == 0 or n_train >= remainder.n:
        raise DataError(
            f"Split of {remainder.n} rows at fraction {spec.train_fraction} leaves an empty partition"
        )

    train = remainder.take(slice(0, n_train))
    test = remainder.take(slice(n_train, None))
    logger.info(f"Split: {train.n} train, {test.n} test, {validation.n} validation rows")
    return train, test, validation


@dataclass(frozen=True)
class PreparedData:
    """Normalized partitions plus the statistics fitted on the training rows"""
    full: TimeSeries
    train: TimeSeries
    test: TimeSeries
    validation: TimeSeries
    stats: NormalizationStats


def prepare_splits(series: TimeSeries, spec: SplitSpec) -> PreparedData:
    """Split, fit normalization on train only, and normalize every partition"""
    train, test, validation = split(series, spec)
    stats = zscore_fit(train)
    return PreparedData(
        full=zscore_apply(series, stats),
        train=zscore_apply(train, stats),
        test=zscore_apply(test, stats),
        validation=zscore_apply(validation, stats),
        stats=stats,
    )
