"""
Moving Average Residual
Short-memory trend model: each instant is reconstructed from the mean of the preceding window
"""

from typing import Dict, Optional, Tuple

import numpy as np

from ..timeseries import TimeSeries
from .base import LossHistory, MOVING_AVERAGE_RESIDUAL, ReconstructionDetector


def _trailing_means(values: np.ndarray, window: int) -> np.ndarray:
    """Mean of rows i-window..i-1 for every i >= window"""
    cumulative = np.vstack([np.zeros((1, values.shape[1])), np.cumsum(values, axis=0)])
    return (cumulative[window:-1] - cumulative[:-window - 1]) / window


class MovingAverageResidualDetector(ReconstructionDetector):
    """Trailing moving average plus the mean training residual per channel"""

    kind = MOVING_AVERAGE_RESIDUAL

    @property
    def warmup(self) -> int:
        return self.spec.window

    def parameter_shapes(self, m: int) -> Dict[str, Tuple[Optional[int], ...]]:
        return {'offset': (m,)}

    def learn(self, train: TimeSeries) -> Tuple[Dict[str, np.ndarray], LossHistory]:
        window = self.spec.window
        residual = train.values[window:] - _trailing_means(train.values, window)
        return {'offset': residual.mean(axis=0)}, LossHistory()

    def reconstruct(self, parameters: Dict[str, np.ndarray], series: TimeSeries) -> np.ndarray:
        return _trailing_means(series.values, self.spec.window) + parameters['offset']
