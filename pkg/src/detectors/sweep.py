"""
Hyperparameter Sweep
Grid expansion, range checks and chronological cross-validation over detector specs
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import ParameterGrid, TimeSeriesSplit

from ..errors import ConfigError
from ..timeseries import TimeSeries
from .base import DetectorSpec
from .registry import fit, score

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRanges:
    """Inclusive bounds each swept hyperparameter must respect"""
    window: Tuple[int, int] = (1, 24)
    batch_size: Tuple[int, int] = (16, 64)
    learning_rate: Tuple[float, float] = (1e-4, 1e-2)
    max_epochs: Tuple[int, int] = (50, 500)
    min_patience: int = 1

    def bounds(self) -> Dict[str, Tuple[float, float]]:
        return {
            'window': self.window,
            'batch_size': self.batch_size,
            'learning_rate': self.learning_rate,
            'max_epochs': self.max_epochs,
        }


def validate_ranges(spec: DetectorSpec, ranges: Optional[SweepRanges] = None) -> None:
    """Raise ConfigError when a hyperparameter of `spec` falls outside `ranges`"""
    ranges = ranges or SweepRanges()
    for key, (low, high) in ranges.bounds().items():
        if key in spec.hyperparameters and not low <= spec.hp(key) <= high:
            raise ConfigError(f"{spec.name}: {key}={spec.hp(key)} outside sweep range [{low}, {high}]")
    if 'patience' in spec.hyperparameters and spec.hp('patience') < ranges.min_patience:
        raise ConfigError(f"{spec.name}: patience={spec.hp('patience')} below {ranges.min_patience}")


def expand_grid(spec: DetectorSpec, grid: Mapping[str, Sequence[Any]]) -> List[DetectorSpec]:
    """Every combination of `grid` applied on top of `spec`, in ParameterGrid order"""
    specs = []
    for params in ParameterGrid({key: list(values) for key, values in grid.items()}):
        hyperparameters = dict(spec.hyperparameters)
        hyperparameters.update(params)
        specs.append(DetectorSpec(kind=spec.kind, hyperparameters=hyperparameters, seed=spec.seed, name=spec.name))
    return specs


def _fold_mae(spec: DetectorSpec, train: TimeSeries, fit_index: np.ndarray, valid_index: np.ndarray) -> float:
    fitted = fit(spec, train.take(fit_index))
    # score the prefix ending at the fold so windows see their causal context
    prefix = train.take(slice(0, int(valid_index[-1]) + 1))
    errors = score(fitted, prefix).scores[-len(valid_index):]
    return float(errors.mean())


def hyperparameter_sweep(
    spec_grid: Sequence[DetectorSpec],
    train: TimeSeries,
    folds: int,
    ranges: Optional[SweepRanges] = None,
) -> DetectorSpec:
    """
    Pick the spec with the lowest mean validation MAE over chronological folds

    Args:
        spec_grid: Candidate specs; the earliest wins ties
        train: Normalized training rows
        folds: Number of expanding-window folds, at least 2

    Returns:
        The winning DetectorSpec
    """
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    if not spec_grid:
        raise ConfigError("hyperparameter sweep needs a non-empty grid")
    for spec in spec_grid:
        validate_ranges(spec, ranges)

    if len(spec_grid) == 1:
        return spec_grid[0]

    splits = list(TimeSeriesSplit(n_splits=folds).split(train.values))
    best_spec, best_mae = None, np.inf
    for spec in spec_grid:
        mae = float(np.mean([_fold_mae(spec, train, fit_index, valid_index) for fit_index, valid_index in splits]))
        logger.debug(f"Sweep candidate {spec.hyperparameters}: mean validation MAE {mae:.6f}")
        if mae < best_mae:
            best_spec, best_mae = spec, mae

    logger.info(f"Sweep for {best_spec.name} selected {best_spec.hyperparameters} (MAE {best_mae:.6f})")
    return best_spec
