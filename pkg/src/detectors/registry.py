"""
Detector Registry
Fit, score and evaluate any registered base model behind the common contract
"""

import hashlib
import logging
import time
from typing import Dict, List, Type

import numpy as np

from ..errors import DetectorError
from ..timeseries import TimeSeries
from .base import (
    DETECTOR_KINDS,
    DetectorSpec,
    FittedDetector,
    ReconstructionDetector,
    ScoreSeries,
    TrainErrorStats,
)
from .knn import KNNDistanceDetector
from .linear_autoencoder import LinearAutoencoderDetector
from .moving_average import MovingAverageResidualDetector
from .pca import PCAReconstructorDetector
from .seasonal import SeasonalResidualDetector

logger = logging.getLogger(__name__)

DETECTORS: Dict[str, Type[ReconstructionDetector]] = {
    cls.kind: cls
    for cls in (
        LinearAutoencoderDetector,
        PCAReconstructorDetector,
        SeasonalResidualDetector,
        MovingAverageResidualDetector,
        KNNDistanceDetector,
    )
}


def build_detector(spec: DetectorSpec) -> ReconstructionDetector:
    return DETECTORS[spec.kind](spec)


def derive_seed(pipeline_seed: int, name: str) -> int:
    """Stable per-detector seed from the pipeline seed and the detector name"""
    digest = hashlib.sha256(f"{pipeline_seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def default_panel(pipeline_seed: int = 0) -> List[DetectorSpec]:
    """One detector of each kind with default hyperparameters, named M1..M5"""
    panel = []
    for position, kind in enumerate(DETECTOR_KINDS, start=1):
        name = f"M{position}"
        panel.append(DetectorSpec(kind=kind, name=name, seed=derive_seed(pipeline_seed, name)))
    return panel


def _errors(values: np.ndarray, reconstruction: np.ndarray) -> np.ndarray:
    errors = np.abs(values - reconstruction).mean(axis=1)
    if not np.all(np.isfinite(errors)):
        raise DetectorError("Reconstruction produced non-finite errors")
    return errors


def fit(spec: DetectorSpec, train: TimeSeries) -> FittedDetector:
    """
    Fit one base model on normalized training rows

    Deterministic given (spec.seed, train); training error statistics come from
    the detector's reconstruction of its own training rows.
    """
    if not train.is_finite():
        raise DetectorError(f"{spec.name}: training rows contain missing or non-finite values")

    detector = build_detector(spec)
    detector.validate(train.m)
    if train.n < detector.min_rows():
        raise DetectorError(
            f"{spec.name}: {train.n} training rows, at least {detector.min_rows()} needed for window {spec.window}"
        )

    started = time.perf_counter()
    parameters, history = detector.learn(train)
    reconstruction = detector.reconstruct_training(parameters, train)
    train_errors = _errors(train.values[detector.warmup:], reconstruction)

    fitted = FittedDetector(
        spec=spec,
        channels=train.channels,
        parameters=parameters,
        train_error_stats=TrainErrorStats.from_scores(train_errors),
        loss_history=history,
        warmup=detector.warmup,
    )
    logger.info(
        f"Fitted {spec.name} ({spec.kind}) on {train.n} rows in {time.perf_counter() - started:.2f}s; "
        f"training error mean {fitted.train_error_stats.mean:.4f} std {fitted.train_error_stats.std:.4f}"
    )
    return fitted


def score(fitted: FittedDetector, series: TimeSeries) -> ScoreSeries:
    """Per-instant mean absolute reconstruction error, attached to each window's last timestamp"""
    if tuple(series.channels) != tuple(fitted.channels):
        raise DetectorError(
            f"{fitted.name}: channel mismatch, fitted on {list(fitted.channels)}, got {list(series.channels)}"
        )
    if series.n <= fitted.warmup:
        return ScoreSeries(series.timestamps[:0], np.empty(0), warmup=series.n)

    detector = build_detector(fitted.spec)
    reconstruction = detector.reconstruct(fitted.parameters, series)
    errors = _errors(series.values[fitted.warmup:], reconstruction)
    return ScoreSeries(series.timestamps[fitted.warmup:], errors, warmup=fitted.warmup)


def evaluate_mae(fitted: FittedDetector, test: TimeSeries) -> float:
    """Mean reconstruction error over the held-out rows"""
    scores = score(fitted, test)
    if len(scores) == 0:
        raise DetectorError(f"{fitted.name}: test set is empty after a warm-up of {fitted.warmup} rows")
    return float(scores.scores.mean())
