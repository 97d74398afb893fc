"""
Detector Persistence
Versioned, self-describing JSON files for fitted detectors
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from ..errors import ConfigError, DetectorError, PersistenceError
from .base import DetectorSpec, FittedDetector, LossHistory, TrainErrorStats
from .registry import build_detector

logger = logging.getLogger(__name__)

FORMAT_NAME = "dualvote-detector"
FORMAT_VERSION = 1

PathLike = Union[str, Path]


def write_atomic(path: PathLike, text: str) -> None:
    """Write `text` to a sibling temp file, then rename it over `path`"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _encode_array(array: np.ndarray) -> Dict[str, Any]:
    array = np.asarray(array)
    return {'dtype': array.dtype.str, 'shape': list(array.shape), 'data': array.ravel().tolist()}


def _decode_array(payload: Dict[str, Any]) -> np.ndarray:
    return np.asarray(payload['data'], dtype=np.dtype(payload['dtype'])).reshape(payload['shape'])


def detector_to_dict(fitted: FittedDetector) -> Dict[str, Any]:
    history = fitted.loss_history
    return {
        'format': FORMAT_NAME,
        'version': FORMAT_VERSION,
        'spec': fitted.spec.to_dict(),
        'channels': list(fitted.channels),
        'parameters': {name: _encode_array(value) for name, value in sorted(fitted.parameters.items())},
        'train_error_stats': {
            'mean': fitted.train_error_stats.mean,
            'std': fitted.train_error_stats.std,
            'scores': _encode_array(fitted.train_error_stats.scores),
        },
        'loss_history': {
            'train': list(history.train),
            'validation': list(history.validation),
            'best_epoch': history.best_epoch,
        },
        'warmup': fitted.warmup,
        'mae': fitted.mae,
    }


def detector_from_dict(data: Dict[str, Any]) -> FittedDetector:
    if not isinstance(data, dict) or data.get('format') != FORMAT_NAME:
        raise PersistenceError(f"Not a {FORMAT_NAME} file")
    if data.get('version') != FORMAT_VERSION:
        raise PersistenceError("Unsupported detector file version", found=data.get('version'), expected=FORMAT_VERSION)

    try:
        stats = data['train_error_stats']
        history = data['loss_history']
        fitted = FittedDetector(
            spec=DetectorSpec.from_dict(data['spec']),
            channels=tuple(data['channels']),
            parameters={name: _decode_array(value) for name, value in data['parameters'].items()},
            train_error_stats=TrainErrorStats(
                mean=float(stats['mean']), std=float(stats['std']), scores=_decode_array(stats['scores'])
            ),
            loss_history=LossHistory(
                train=tuple(history['train']),
                validation=tuple(history['validation']),
                best_epoch=history['best_epoch'],
            ),
            warmup=int(data['warmup']),
            mae=data['mae'],
        )
    except (ConfigError, KeyError, TypeError, ValueError) as e:
        raise PersistenceError(f"Malformed detector file: {e}") from e

    try:
        build_detector(fitted.spec).check_parameters(fitted.parameters, len(fitted.channels))
    except DetectorError as e:
        raise PersistenceError(f"Malformed detector file: {e}") from e
    return fitted


def save_detector(fitted: FittedDetector, path: PathLike) -> Path:
    """Persist a fitted detector; the file appears only once fully written"""
    path = Path(path)
    try:
        write_atomic(path, json.dumps(detector_to_dict(fitted), indent=2))
    except OSError as e:
        raise PersistenceError(f"Cannot write detector file {path}: {e}") from e
    logger.info(f"Saved detector {fitted.name} to {path}")
    return path


def load_detector(path: PathLike) -> FittedDetector:
    """Load a detector written by save_detector"""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise PersistenceError(f"Cannot read detector file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise PersistenceError(f"Corrupted detector file {path}: {e}") from e

    fitted = detector_from_dict(data)
    logger.debug(f"Loaded detector {fitted.name} from {path}")
    return fitted
