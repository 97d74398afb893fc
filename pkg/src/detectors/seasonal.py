"""
Seasonal Residual
Per-phase seasonal profile learned from training rows; the profile is the reconstruction
"""

from typing import Dict, Optional, Tuple

import numpy as np

from ..timeseries import TimeSeries
from .base import LossHistory, ReconstructionDetector, SEASONAL_RESIDUAL


def estimate_period(train: TimeSeries, max_period: int = 0) -> int:
    """Dominant period in samples from the power spectrum summed over channels"""
    values = train.values - train.values.mean(axis=0)
    power = (np.abs(np.fft.rfft(values, axis=0)) ** 2).sum(axis=1)
    if power.shape[0] < 2 or not np.any(power[1:] > 0):
        return 1
    frequency = int(np.argmax(power[1:])) + 1
    period = max(1, int(round(train.n / frequency)))
    if max_period:
        period = min(period, max_period)
    return period


def _sample_steps(timestamps: np.ndarray, origin: int, step: int) -> np.ndarray:
    return np.rint((timestamps.astype(np.int64) - origin) / step).astype(np.int64)


class SeasonalResidualDetector(ReconstructionDetector):
    """Subtracts the mean value observed at the same phase of the training period"""

    kind = SEASONAL_RESIDUAL

    @property
    def warmup(self) -> int:
        return 0

    def min_rows(self) -> int:
        return 2

    def parameter_shapes(self, m: int) -> Dict[str, Tuple[Optional[int], ...]]:
        return {'profile': (None, m), 'origin': (1,), 'step': (1,)}

    def learn(self, train: TimeSeries) -> Tuple[Dict[str, np.ndarray], LossHistory]:
        period = int(self.spec.hp('period'))
        if period == 0:
            period = estimate_period(train, max_period=train.n // 2 or 1)
            self.logger.info(f"{self.spec.name}: estimated seasonal period {period} samples")

        stamps = train.timestamps.astype(np.int64)
        origin = int(stamps[0])
        step = max(1, int(np.median(np.diff(stamps))))
        phase = _sample_steps(train.timestamps, origin, step) % period

        profile = np.tile(train.values.mean(axis=0), (period, 1))
        counts = np.bincount(phase, minlength=period)
        for channel in range(train.m):
            sums = np.bincount(phase, weights=train.values[:, channel], minlength=period)
            seen = counts > 0
            profile[seen, channel] = sums[seen] / counts[seen]

        parameters = {
            'profile': profile,
            'origin': np.array([origin], dtype=np.int64),
            'step': np.array([step], dtype=np.int64),
        }
        return parameters, LossHistory()

    def reconstruct(self, parameters: Dict[str, np.ndarray], series: TimeSeries) -> np.ndarray:
        profile = parameters['profile']
        steps = _sample_steps(series.timestamps, int(parameters['origin'][0]), int(parameters['step'][0]))
        return profile[steps % profile.shape[0]]
