"""
Detector Contract
Specifications, fitted state, score and label series shared by every base model
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar, Dict, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from ..errors import ConfigError, DetectorError
from ..timeseries import TimeSeries

WINDOW_LINEAR_AUTOENCODER = "window-linear-autoencoder"
PCA_RECONSTRUCTOR = "pca-reconstructor"
SEASONAL_RESIDUAL = "seasonal-residual"
MOVING_AVERAGE_RESIDUAL = "moving-average-residual"
KNN_DISTANCE = "knn-distance"

DETECTOR_KINDS = (
    WINDOW_LINEAR_AUTOENCODER,
    PCA_RECONSTRUCTOR,
    SEASONAL_RESIDUAL,
    MOVING_AVERAGE_RESIDUAL,
    KNN_DISTANCE,
)

DEFAULT_HYPERPARAMETERS: Dict[str, Dict[str, Any]] = {
    WINDOW_LINEAR_AUTOENCODER: {
        'window': 8,
        'latent': 4,
        'learning_rate': 0.01,
        'batch_size': 64,
        'max_epochs': 50,
        'patience': 5,
        'validation_fraction': 0.2,
    },
    PCA_RECONSTRUCTOR: {'window': 8, 'latent': 3},
    SEASONAL_RESIDUAL: {'window': 1, 'period': 0},
    MOVING_AVERAGE_RESIDUAL: {'window': 8},
    KNN_DISTANCE: {'window': 8, 'neighbors': 3},
}

MEAN_PLUS_K_SIGMA = "mean-plus-k-sigma"
QUANTILE = "quantile"


@dataclass(frozen=True)
class DetectorSpec:
    """Kind, hyperparameters and seed of one base model"""
    kind: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise ConfigError(f"Unknown detector kind '{self.kind}', expected one of {DETECTOR_KINDS}")

        merged = dict(DEFAULT_HYPERPARAMETERS[self.kind])
        unknown = set(self.hyperparameters) - set(merged)
        if unknown:
            raise ConfigError(f"Unknown hyperparameters for {self.kind}: {sorted(unknown)}")
        merged.update(self.hyperparameters)

        for key in ('window', 'latent', 'patience', 'neighbors', 'batch_size', 'max_epochs'):
            if key in merged and int(merged[key]) < 1:
                raise ConfigError(f"{key} must be >= 1, got {merged[key]}")
        if merged.get('period', 0) < 0:
            raise ConfigError(f"period must be >= 0, got {merged['period']}")
        if 'learning_rate' in merged and not merged['learning_rate'] > 0:
            raise ConfigError(f"learning_rate must be > 0, got {merged['learning_rate']}")
        if 'validation_fraction' in merged and not 0 < merged['validation_fraction'] < 1:
            raise ConfigError(f"validation_fraction must lie in (0, 1), got {merged['validation_fraction']}")

        object.__setattr__(self, "hyperparameters", dict(sorted(merged.items())))
        object.__setattr__(self, "name", self.name or self.kind)
        object.__setattr__(self, "seed", int(self.seed))

    def hp(self, key: str) -> Any:
        return self.hyperparameters[key]

    @property
    def window(self) -> int:
        return int(self.hyperparameters['window'])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'name': self.name,
            'seed': self.seed,
            'hyperparameters': dict(self.hyperparameters),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DetectorSpec":
        return cls(
            kind=data['kind'],
            hyperparameters=data.get('hyperparameters', {}),
            seed=data.get('seed', 0),
            name=data.get('name', ""),
        )


@dataclass(frozen=True)
class ThresholdRule:
    """Binarization rule applied to reconstruction errors"""
    kind: str = MEAN_PLUS_K_SIGMA
    k: float = 3.0
    quantile: Optional[float] = None

    def __post_init__(self):
        if self.kind == MEAN_PLUS_K_SIGMA:
            if not self.k > 0:
                raise ConfigError(f"k must be > 0, got {self.k}")
        elif self.kind == QUANTILE:
            if self.quantile is None or not 0 < self.quantile < 1:
                raise ConfigError(f"quantile must lie in (0, 1), got {self.quantile}")
        else:
            raise ConfigError(f"Unknown threshold rule '{self.kind}'")


@dataclass(frozen=True, eq=False)
class TrainErrorStats:
    """Distribution of per-instance training reconstruction errors"""
    mean: float
    std: float
    scores: np.ndarray

    @classmethod
    def from_scores(cls, scores: np.ndarray) -> "TrainErrorStats":
        scores = np.asarray(scores, dtype=np.float64)
        return cls(mean=float(scores.mean()), std=float(scores.std()), scores=scores)

    def threshold(self, rule: ThresholdRule) -> float:
        if rule.kind == QUANTILE:
            return float(np.quantile(self.scores, rule.quantile))
        return self.mean + rule.k * self.std


@dataclass(frozen=True)
class LossHistory:
    """Per-epoch training and validation loss of an iterative detector"""
    train: Tuple[float, ...] = ()
    validation: Tuple[float, ...] = ()
    best_epoch: Optional[int] = None

    def __bool__(self) -> bool:
        return bool(self.train)

    def curve(self, which: str) -> pd.DataFrame:
        losses = self.train if which == "train" else self.validation
        return pd.DataFrame({'epoch': np.arange(1, len(losses) + 1), 'loss': list(losses)})


@dataclass(frozen=True)
class ScoreSeries:
    """Per-instance reconstruction error aligned to the last timestamp of each window"""
    timestamps: np.ndarray
    scores: np.ndarray
    warmup: int = 0

    def __len__(self) -> int:
        return int(self.scores.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoreSeries):
            return NotImplemented
        return (
            self.warmup == other.warmup
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.scores, other.scores)
        )


@dataclass(frozen=True)
class LabelSeries:
    """Binary verdict per instant, 1 = anomaly"""
    timestamps: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.shape[0] != np.asarray(self.timestamps).shape[0]:
            raise DetectorError("labels and timestamps differ in length")
        if not np.isin(labels, (0, 1)).all():
            raise DetectorError("labels must be 0 or 1")
        object.__setattr__(self, "labels", labels.astype(np.int8))
        object.__setattr__(self, "timestamps", np.asarray(self.timestamps).astype("datetime64[ms]"))

    @property
    def anomalies(self) -> np.ndarray:
        return self.timestamps[self.labels == 1]

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelSeries):
            return NotImplemented
        return np.array_equal(self.timestamps, other.timestamps) and np.array_equal(self.labels, other.labels)

    def restrict(self, timestamps: np.ndarray) -> "LabelSeries":
        keep = np.isin(self.timestamps, timestamps)
        return LabelSeries(self.timestamps[keep], self.labels[keep])


@dataclass(frozen=True, eq=False)
class FittedDetector:
    """One fitted base model with its training statistics and held-out MAE"""
    spec: DetectorSpec
    channels: Tuple[str, ...]
    parameters: Dict[str, np.ndarray]
    train_error_stats: TrainErrorStats
    loss_history: LossHistory = field(default_factory=LossHistory)
    warmup: int = 0
    mae: Optional[float] = None

    @property
    def name(self) -> str:
        return self.spec.name

    def with_mae(self, mae: float) -> "FittedDetector":
        if mae < 0:
            raise DetectorError(f"mae must be >= 0, got {mae}")
        return replace(self, mae=float(mae))


def sliding_windows(values: np.ndarray, window: int) -> np.ndarray:
    """Flattened windows (n - window + 1, window * m), row i ending at sample i + window - 1"""
    views = np.lib.stride_tricks.sliding_window_view(values, window, axis=0)
    # views: (n - w + 1, m, w) -> time-major flattening
    return np.ascontiguousarray(views.transpose(0, 2, 1)).reshape(views.shape[0], -1)


class ReconstructionDetector(ABC):
    """Engine that learns parameters from normalized training rows and reconstructs instants"""

    kind: ClassVar[str]

    def __init__(self, spec: DetectorSpec):
        self.spec = spec
        self.logger = logging.getLogger(__name__)

    @property
    def warmup(self) -> int:
        """Leading rows that receive no reconstruction"""
        return self.spec.window - 1

    def min_rows(self) -> int:
        return self.warmup + 1

    def validate(self, m: int) -> None:
        if 'latent' in self.spec.hyperparameters:
            latent = int(self.spec.hp('latent'))
            if latent >= self.spec.window * m:
                raise ConfigError(
                    f"{self.spec.name}: latent size {latent} must be < window * channels = {self.spec.window * m}"
                )

    @abstractmethod
    def parameter_shapes(self, m: int) -> Dict[str, Tuple[Optional[int], ...]]:
        """Shape of every learned array for m channels; None matches any positive length"""

    def check_parameters(self, parameters: Mapping[str, np.ndarray], m: int) -> None:
        expected = self.parameter_shapes(m)
        if set(parameters) != set(expected):
            raise DetectorError(
                f"{self.spec.name}: parameters {sorted(parameters)} do not match {sorted(expected)}"
            )
        for name, shape in expected.items():
            actual = np.shape(parameters[name])
            mismatch = len(actual) != len(shape) or any(
                got < 1 if want is None else got != want for want, got in zip(shape, actual)
            )
            if mismatch:
                raise DetectorError(f"{self.spec.name}: parameter '{name}' has shape {actual}, expected {shape}")

    @abstractmethod
    def learn(self, train: TimeSeries) -> Tuple[Dict[str, np.ndarray], LossHistory]:
        """Learn parameters from normalized training rows"""

    @abstractmethod
    def reconstruct(self, parameters: Dict[str, np.ndarray], series: TimeSeries) -> np.ndarray:
        """Reconstruction of rows warmup..n-1, shape (n - warmup, m)"""

    def reconstruct_training(self, parameters: Dict[str, np.ndarray], train: TimeSeries) -> np.ndarray:
        """Reconstruction of the training rows used for the error statistics"""
        return self.reconstruct(parameters, train)


def predict_labels(scores: ScoreSeries, rule: ThresholdRule, train_stats: TrainErrorStats) -> LabelSeries:
    """Label 1 where the score strictly exceeds the rule's training-error threshold"""
    threshold = train_stats.threshold(rule)
    return LabelSeries(scores.timestamps, (scores.scores > threshold).astype(np.int8))
