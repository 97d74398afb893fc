"""
PCA Reconstructor
Closed-form low-rank reconstruction of flattened windows
"""

from typing import Dict, Optional, Tuple

import numpy as np
from sklearn.decomposition import PCA

from ..timeseries import TimeSeries
from .base import LossHistory, PCA_RECONSTRUCTOR, ReconstructionDetector, sliding_windows


class PCAReconstructorDetector(ReconstructionDetector):
    """Projects each window onto its leading principal components and back"""

    kind = PCA_RECONSTRUCTOR

    def parameter_shapes(self, m: int) -> Dict[str, Tuple[Optional[int], ...]]:
        dim = self.spec.window * m
        return {'mean': (dim,), 'components': (None, dim)}

    def learn(self, train: TimeSeries) -> Tuple[Dict[str, np.ndarray], LossHistory]:
        windows = sliding_windows(train.values, self.spec.window)
        latent = min(int(self.spec.hp('latent')), len(windows))
        pca = PCA(n_components=latent, svd_solver='full')
        with np.errstate(divide='ignore', invalid='ignore'):
            pca.fit(windows)

        self.logger.debug(f"{self.spec.name}: explained variance {np.nan_to_num(pca.explained_variance_ratio_).sum():.4f}")
        parameters = {
            'mean': pca.mean_.copy(),
            'components': pca.components_.copy(),
        }
        return parameters, LossHistory()

    def reconstruct(self, parameters: Dict[str, np.ndarray], series: TimeSeries) -> np.ndarray:
        windows = sliding_windows(series.values, self.spec.window)
        centered = windows - parameters['mean']
        components = parameters['components']
        decoded = (centered @ components.T) @ components + parameters['mean']
        return decoded[:, -series.m:]
