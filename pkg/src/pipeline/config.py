"""
Pipeline Configuration
Validated run settings loaded from a YAML file with command-line overrides
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..detectors import (
    DETECTOR_KINDS,
    MEAN_PLUS_K_SIGMA,
    QUANTILE,
    DetectorSpec,
    SweepRanges,
    ThresholdRule,
    derive_seed,
    expand_grid,
    validate_ranges,
)
from ..errors import ConfigError
from ..timeseries import SplitSpec

logger = logging.getLogger(__name__)

DetectorKind = Literal[
    "window-linear-autoencoder",
    "pca-reconstructor",
    "seasonal-residual",
    "moving-average-residual",
    "knn-distance",
]
Number = Union[int, float]

# settings that change where or how fast a run happens but never its results
_UNHASHED_FIELDS = {'output_dir', 'parallelism'}


class SplitConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    train_fraction: float = Field(0.8, gt=0, lt=1, description="Share of non-validation rows used for training")
    validation_start: Optional[str] = Field(None, description="Inclusive start of the held-out validation interval")
    validation_end: Optional[str] = Field(None, description="Exclusive end of the held-out validation interval")

    @model_validator(mode='after')
    def _check_range(self) -> "SplitConfig":
        if (self.validation_start is None) != (self.validation_end is None):
            raise ValueError("validation_start and validation_end must be given together")
        if self.validation_start is not None:
            try:
                self.to_spec()
            except (ConfigError, ValueError) as e:
                raise ValueError(str(e)) from e
        return self

    @property
    def has_validation(self) -> bool:
        return self.validation_start is not None

    def to_spec(self) -> SplitSpec:
        validation_range = None
        if self.has_validation:
            validation_range = (self.validation_start, self.validation_end)
        return SplitSpec(train_fraction=self.train_fraction, validation_range=validation_range)


class ThresholdConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: Literal["mean-plus-k-sigma", "quantile"] = MEAN_PLUS_K_SIGMA
    k: float = Field(3.0, gt=0)
    quantile: Optional[float] = Field(None, gt=0, lt=1)

    @model_validator(mode='after')
    def _check_quantile(self) -> "ThresholdConfig":
        if self.kind == QUANTILE and self.quantile is None:
            raise ValueError("quantile rule needs a quantile in (0, 1)")
        return self

    def to_rule(self) -> ThresholdRule:
        return ThresholdRule(kind=self.kind, k=self.k, quantile=self.quantile)


class DetectorConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: DetectorKind
    name: Optional[str] = Field(None, min_length=1)
    hyperparameters: Dict[str, Number] = Field(default_factory=dict)
    grid: Dict[str, List[Number]] = Field(default_factory=dict, description="Values swept when sweep_folds is set")

    def to_spec(self, pipeline_seed: int, position: int) -> DetectorSpec:
        name = self.name or f"M{position}"
        return DetectorSpec(
            kind=self.kind,
            hyperparameters=self.hyperparameters,
            seed=derive_seed(pipeline_seed, name),
            name=name,
        )


class SweepRangesConfig(BaseModel):
    """Inclusive hyperparameter bounds every panel entry and sweep grid must respect"""
    model_config = ConfigDict(extra='forbid')

    window: Tuple[int, int] = SweepRanges.window
    batch_size: Tuple[int, int] = SweepRanges.batch_size
    learning_rate: Tuple[float, float] = SweepRanges.learning_rate
    max_epochs: Tuple[int, int] = SweepRanges.max_epochs
    min_patience: int = Field(SweepRanges.min_patience, ge=1)

    @model_validator(mode='after')
    def _check_bounds(self) -> "SweepRangesConfig":
        for key in ('window', 'batch_size', 'learning_rate', 'max_epochs'):
            low, high = getattr(self, key)
            if not 0 < low <= high:
                raise ValueError(f"sweep range for {key} must satisfy 0 < low <= high, got [{low}, {high}]")
        return self

    def to_ranges(self) -> SweepRanges:
        return SweepRanges(**self.model_dump())


def _default_detectors() -> List[DetectorConfig]:
    return [DetectorConfig(kind=kind) for kind in DETECTOR_KINDS]


class PipelineConfig(BaseModel):
    """Everything a run needs; identical configs over identical input give identical reports"""
    model_config = ConfigDict(extra='forbid')

    input: Optional[Path] = Field(None, description="CSV of timestamped sensor channels")
    timestamp_column: Optional[str] = None
    resample_interval: Optional[str] = Field(None, description="Pandas offset such as '1s'; absent means no resampling")
    resample_aggregator: Literal["mean"] = "mean"
    split: SplitConfig = Field(default_factory=SplitConfig)
    detectors: List[DetectorConfig] = Field(default_factory=_default_detectors, min_length=1)
    threshold: ThresholdConfig = Field(default_factory=ThresholdConfig)
    seed: int = Field(0, ge=0, lt=2**64)
    output_dir: Path = Path("output")
    target: Optional[Literal["test", "validation"]] = None
    mae_source: Literal["test", "validation", "fixture-file"] = "test"
    fixture_votes: Optional[Path] = None
    fixture_mae: Optional[Path] = None
    sweep_folds: Optional[int] = Field(None, ge=2)
    sweep_ranges: SweepRangesConfig = Field(default_factory=SweepRangesConfig)
    parallelism: int = Field(1, ge=1)

    @model_validator(mode='after')
    def _check_consistency(self) -> "PipelineConfig":
        try:
            panel = self.panel()
            ranges = self.sweep_ranges.to_ranges()
            for spec, detector in zip(panel, self.detectors):
                validate_ranges(spec, ranges)
                if detector.grid:
                    for candidate in expand_grid(spec, detector.grid):
                        validate_ranges(candidate, ranges)
        except ConfigError as e:
            raise ValueError(str(e)) from e
        names = [spec.name for spec in panel]
        if len(set(names)) != len(names):
            raise ValueError(f"detector names must be unique, got {names}")

        if self.mae_source == "fixture-file" and self.fixture_mae is None:
            raise ValueError("mae_source 'fixture-file' needs fixture_mae")
        if self.fixture_votes is not None and self.fixture_mae is None:
            raise ValueError("fixture_votes needs fixture_mae")
        if not self.split.has_validation:
            if self.target == "validation":
                raise ValueError("target 'validation' needs a validation range")
            if self.mae_source == "validation":
                raise ValueError("mae_source 'validation' needs a validation range")
        return self

    @property
    def fixture_mode(self) -> bool:
        return self.fixture_votes is not None

    @property
    def resolved_target(self) -> str:
        if self.target is not None:
            return self.target
        return "validation" if self.split.has_validation else "test"

    def panel(self) -> List[DetectorSpec]:
        return [detector.to_spec(self.seed, position) for position, detector in enumerate(self.detectors, start=1)]

    def grids(self) -> Dict[str, Dict[str, List[Number]]]:
        return {spec.name: detector.grid for spec, detector in zip(self.panel(), self.detectors)}


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Any]] = None) -> PipelineConfig:
    """
    Build a PipelineConfig from a YAML file and flag overrides

    Override values of None are ignored, so unset flags keep the file's value.
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"Config file {path} is not valid YAML: {e}") from e
        if loaded is not None and not isinstance(loaded, dict):
            raise ConfigError(f"Config file {path} must hold a mapping of settings")
        data.update(loaded or {})

    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    try:
        config = PipelineConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e

    logger.debug(f"Loaded configuration with {len(config.detectors)} detectors, seed {config.seed}")
    return config


def config_hash(config: PipelineConfig) -> str:
    """SHA-256 of the canonical JSON form of every result-affecting setting"""
    payload = config.model_dump(mode='json', exclude=_UNHASHED_FIELDS)
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
