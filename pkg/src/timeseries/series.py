"""
Time Series Containers
Immutable multichannel series, normalization statistics and split specification
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from ..errors import ConfigError, DataError

INSTANT_DTYPE = "datetime64[ms]"


def to_instants(values: Iterable) -> np.ndarray:
    """Convert timestamps (strings, datetimes, datetime64) to millisecond instants"""
    items = list(values)
    if items and isinstance(items[0], str):
        parsed = pd.to_datetime(items, format="ISO8601")
    else:
        parsed = pd.to_datetime(items)
    return np.asarray(parsed, dtype="datetime64[ns]").astype(INSTANT_DTYPE)


def format_instant(instant: np.datetime64) -> str:
    """Render an instant as 'YYYY-MM-DD HH:MM:SS.fff'"""
    return pd.Timestamp(instant).isoformat(sep=" ", timespec="milliseconds")


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class TimeSeries:
    """Timestamped n x m matrix of sensor channels"""
    timestamps: np.ndarray
    channels: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        timestamps = np.asarray(self.timestamps)
        if timestamps.dtype.kind != "M":
            timestamps = to_instants(timestamps)
        timestamps = _readonly(timestamps.astype(INSTANT_DTYPE))
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        channels = tuple(str(c) for c in self.channels)

        if values.ndim != 2 or values.shape[0] != timestamps.shape[0]:
            raise DataError(
                f"values has shape {values.shape} but there are {timestamps.shape[0]} timestamps"
            )
        if values.shape[1] != len(channels):
            raise DataError(f"values has {values.shape[1]} columns but {len(channels)} channels are named")
        if timestamps.shape[0] > 1 and not np.all(np.diff(timestamps.astype(np.int64)) > 0):
            raise DataError("timestamps must be strictly increasing")

        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "values", _readonly(values))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    def __len__(self) -> int:
        return self.n

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def take(self, index) -> "TimeSeries":
        """Rows selected by a boolean mask, slice or integer index array"""
        return TimeSeries(self.timestamps[index], self.channels, self.values[index])

    def with_values(self, values: np.ndarray) -> "TimeSeries":
        return TimeSeries(self.timestamps, self.channels, values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.channels == other.channels
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=list(self.channels))
        frame.index = pd.DatetimeIndex(self.timestamps.astype("datetime64[ns]"), name="timestamp")
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "TimeSeries":
        return cls(
            timestamps=np.asarray(frame.index, dtype="datetime64[ns]").astype(INSTANT_DTYPE),
            channels=tuple(frame.columns),
            values=frame.to_numpy(dtype=np.float64),
        )


@dataclass(frozen=True)
class NormalizationStats:
    """Per-channel population mean and standard deviation of the training rows"""
    channels: Tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    constant_channel: np.ndarray = field(default=None)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        if np.any(std < 0):
            raise DataError("standard deviations must be non-negative")
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "std", _readonly(std))
        object.__setattr__(self, "constant_channel", _readonly(std == 0))

    def to_dict(self) -> dict:
        return {
            "channels": list(self.channels),
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationStats":
        return cls(channels=tuple(data["channels"]), mean=data["mean"], std=data["std"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormalizationStats):
            return NotImplemented
        return (
            self.channels == other.channels
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.std, other.std)
        )


@dataclass(frozen=True)
class SplitSpec:
    """Chronological train/test split with an optional held-out validation interval [start, end)"""
    train_fraction: float = 0.8
    validation_range: Optional[Tuple[np.datetime64, np.datetime64]] = None

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if self.validation_range is not None:
            start, end = to_instants(list(self.validation_range))
            if not start < end:
                raise ConfigError("validation range start must precede its end")
            object.__setattr__(self, "validation_range", (start, end))

    def train_count(self, n: int) -> int:
        """floor(train_fraction * n), evaluated on the decimal value of the fraction"""
        return int(Fraction(str(self.train_fraction)) * n)
