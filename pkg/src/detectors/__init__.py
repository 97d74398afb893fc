"""
Detectors Module
Reconstruction-based base models, thresholding, sweeps and persistence
"""

from .base import (
    DETECTOR_KINDS,
    DEFAULT_HYPERPARAMETERS,
    WINDOW_LINEAR_AUTOENCODER,
    PCA_RECONSTRUCTOR,
    SEASONAL_RESIDUAL,
    MOVING_AVERAGE_RESIDUAL,
    KNN_DISTANCE,
    MEAN_PLUS_K_SIGMA,
    QUANTILE,
    DetectorSpec,
    ThresholdRule,
    TrainErrorStats,
    LossHistory,
    ScoreSeries,
    LabelSeries,
    FittedDetector,
    ReconstructionDetector,
    sliding_windows,
    predict_labels,
)
from .training import EarlyStopping
from .seasonal import estimate_period
from .registry import DETECTORS, build_detector, derive_seed, default_panel, fit, score, evaluate_mae
from .sweep import SweepRanges, validate_ranges, expand_grid, hyperparameter_sweep
from .persistence import save_detector, load_detector, write_atomic, FORMAT_VERSION

__all__ = [
    'DETECTOR_KINDS', 'DEFAULT_HYPERPARAMETERS', 'WINDOW_LINEAR_AUTOENCODER', 'PCA_RECONSTRUCTOR',
    'SEASONAL_RESIDUAL', 'MOVING_AVERAGE_RESIDUAL', 'KNN_DISTANCE', 'MEAN_PLUS_K_SIGMA', 'QUANTILE',
    'DetectorSpec', 'ThresholdRule', 'TrainErrorStats', 'LossHistory', 'ScoreSeries', 'LabelSeries',
    'FittedDetector', 'ReconstructionDetector', 'sliding_windows', 'predict_labels', 'EarlyStopping',
    'estimate_period', 'DETECTORS', 'build_detector', 'derive_seed', 'default_panel', 'fit', 'score',
    'evaluate_mae', 'SweepRanges', 'validate_ranges', 'expand_grid', 'hyperparameter_sweep',
    'save_detector', 'load_detector', 'write_atomic', 'FORMAT_VERSION',
]
