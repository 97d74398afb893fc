"""
KNN Distance
Density view: an instant is reconstructed from the nearest training windows
"""

from typing import Dict, Optional, Tuple

import numpy as np
from sklearn.neighbors import NearestNeighbors

from ..timeseries import TimeSeries
from .base import KNN_DISTANCE, LossHistory, ReconstructionDetector, sliding_windows


class KNNDistanceDetector(ReconstructionDetector):
    """Averages the last element of the k nearest training windows"""

    kind = KNN_DISTANCE

    def min_rows(self) -> int:
        return self.spec.window + int(self.spec.hp('neighbors'))

    def _index(self, bank: np.ndarray) -> NearestNeighbors:
        neighbors = min(int(self.spec.hp('neighbors')), len(bank))
        return NearestNeighbors(n_neighbors=neighbors).fit(bank)

    def parameter_shapes(self, m: int) -> Dict[str, Tuple[Optional[int], ...]]:
        return {'bank': (None, self.spec.window * m)}

    def learn(self, train: TimeSeries) -> Tuple[Dict[str, np.ndarray], LossHistory]:
        return {'bank': sliding_windows(train.values, self.spec.window)}, LossHistory()

    def reconstruct(self, parameters: Dict[str, np.ndarray], series: TimeSeries) -> np.ndarray:
        bank = parameters['bank']
        windows = sliding_windows(series.values, self.spec.window)
        _, index = self._index(bank).kneighbors(windows)
        return bank[index][:, :, -series.m:].mean(axis=1)

    def reconstruct_training(self, parameters: Dict[str, np.ndarray], train: TimeSeries) -> np.ndarray:
        """Leave-one-out reconstruction of the bank itself (a window is not its own neighbor)"""
        bank = parameters['bank']
        neighbors = min(int(self.spec.hp('neighbors')), len(bank) - 1)
        _, index = NearestNeighbors(n_neighbors=neighbors).fit(bank).kneighbors()
        return bank[index][:, :, -train.m:].mean(axis=1)
