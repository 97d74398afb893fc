"""
Time Series Module
Handles CSV ingestion, resampling, splitting and leakage-safe normalization
"""

from .series import TimeSeries, NormalizationStats, SplitSpec, to_instants, format_instant
from .loader import load_csv
from .preprocessing import (
    resample,
    fill_missing,
    zscore_fit,
    zscore_apply,
    split,
    prepare_splits,
    PreparedData,
)

__all__ = [
    'TimeSeries', 'NormalizationStats', 'SplitSpec', 'to_instants', 'format_instant',
    'load_csv', 'resample', 'fill_missing', 'zscore_fit', 'zscore_apply', 'split',
    'prepare_splits', 'PreparedData',
]
