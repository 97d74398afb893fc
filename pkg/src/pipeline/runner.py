"""
Anomaly Pipeline
Ingest, preprocess, fit the detector panel, score, fuse and report
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from functools import reduce
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..detectors import (
    DetectorSpec,
    FittedDetector,
    LabelSeries,
    ScoreSeries,
    evaluate_mae,
    expand_grid,
    fit,
    hyperparameter_sweep,
    load_detector,
    predict_labels,
    save_detector,
    score,
    write_atomic,
)
from ..errors import ConfigError, DataError, PersistenceError, StageError
from ..fusion import FusionResult, dual_fusion, labels_from_vote_table, load_mae_table
from ..timeseries import (
    NormalizationStats,
    PreparedData,
    TimeSeries,
    fill_missing,
    format_instant,
    load_csv,
    prepare_splits,
    resample,
    zscore_apply,
)
from .config import PipelineConfig, config_hash
from .report import (
    AnomalyReport,
    DetectorSummary,
    RunMetadata,
    emit_report,
    remove_report,
    summarize_detector,
    summarize_fusion,
)

MODELS_DIR = "models"
PANEL_FILE = "panel.json"
NORMALIZATION_FILE = "normalization.json"


class AnomalyPipeline:
    """Runs the configured detector panel end to end and fuses its verdicts"""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.rule = config.threshold.to_rule()

    @contextmanager
    def _stage(self, name: str) -> Iterator[None]:
        self.logger.info(f"Stage '{name}' started")
        try:
            yield
        except StageError:
            raise
        except Exception as e:
            self.logger.error(f"Stage '{name}' failed: {e}")
            raise StageError(name, e) from e

    @property
    def output_dir(self) -> Path:
        return Path(self.config.output_dir)

    # ingestion and preprocessing

    def load_series(self, path: Optional[Path] = None) -> TimeSeries:
        path = path or self.config.input
        if path is None:
            raise ConfigError("No input CSV configured")
        series = load_csv(path, timestamp_column=self.config.timestamp_column)
        if self.config.resample_interval:
            return resample(series, self.config.resample_interval, self.config.resample_aggregator)
        return fill_missing(series)

    def prepare(self, series: TimeSeries) -> PreparedData:
        return prepare_splits(series, self.config.split.to_spec())

    # detector panel

    def _select_spec(self, spec: DetectorSpec, train: TimeSeries) -> DetectorSpec:
        grid = self.config.grids().get(spec.name)
        if not self.config.sweep_folds or not grid:
            return spec
        return hyperparameter_sweep(
            expand_grid(spec, grid), train, self.config.sweep_folds, self.config.sweep_ranges.to_ranges()
        )

    def _fit_one(self, spec: DetectorSpec, train: TimeSeries) -> FittedDetector:
        return fit(self._select_spec(spec, train), train)

    def fit_panel(self, train: TimeSeries) -> List[FittedDetector]:
        """Fit every configured detector; results come back in panel order"""
        specs = self.config.panel()
        with ThreadPoolExecutor(max_workers=self.config.parallelism) as executor:
            return list(executor.map(lambda spec: self._fit_one(spec, train), specs))

    def attach_mae(self, fitted: List[FittedDetector], prepared: PreparedData) -> List[FittedDetector]:
        source = self.config.mae_source
        if source == "fixture-file":
            table = load_mae_table(self.config.fixture_mae)
            missing = [detector.name for detector in fitted if detector.name not in table]
            if missing:
                raise ConfigError(f"MAE fixture {self.config.fixture_mae} has no entry for {missing}")
            return [detector.with_mae(table[detector.name]) for detector in fitted]

        held_out = prepared.test if source == "test" else prepared.validation
        return [detector.with_mae(evaluate_mae(detector, held_out)) for detector in fitted]

    def target_rows(self, prepared: PreparedData) -> TimeSeries:
        return prepared.validation if self.config.resolved_target == "validation" else prepared.test

    def label_panel(self, fitted: List[FittedDetector], full: TimeSeries, target: np.ndarray) -> Dict[str, LabelSeries]:
        """
        Score the full series with every detector and label the target instants

        Windows take their context from the rows preceding the target range.
        Instants that some detector leaves unscored are dropped.
        """
        def scored(detector: FittedDetector) -> ScoreSeries:
            series = score(detector, full)
            keep = np.isin(series.timestamps, target)
            return ScoreSeries(series.timestamps[keep], series.scores[keep], warmup=series.warmup)

        with ThreadPoolExecutor(max_workers=self.config.parallelism) as executor:
            scores = list(executor.map(scored, fitted))

        common = reduce(np.intersect1d, [s.timestamps for s in scores])
        if common.shape[0] < target.shape[0]:
            self.logger.warning(f"{target.shape[0] - common.shape[0]} target instants lack a score from every detector")
        if common.shape[0] == 0:
            raise DataError("No target instant was scored by every detector")

        labels = {}
        for detector, series in zip(fitted, scores):
            keep = np.isin(series.timestamps, common)
            restricted = ScoreSeries(series.timestamps[keep], series.scores[keep], warmup=series.warmup)
            labels[detector.name] = predict_labels(restricted, self.rule, detector.train_error_stats)
            self.logger.info(f"{detector.name}: {int(labels[detector.name].labels.sum())} of {common.shape[0]} instants flagged")
        return labels

    # runs

    def run(self) -> AnomalyReport:
        """Full run, or fixture-mode fusion when a vote table is configured"""
        if self.config.fixture_mode:
            return self.run_fixture()

        remove_report(self.output_dir, [spec.name for spec in self.config.panel()])
        with self._stage("load"):
            series = self.load_series()
        with self._stage("preprocess"):
            prepared = self.prepare(series)
        with self._stage("fit"):
            fitted = self.fit_panel(prepared.train)
        with self._stage("evaluate"):
            fitted = self.attach_mae(fitted, prepared)
        with self._stage("score"):
            target = self.target_rows(prepared)
            labels = self.label_panel(fitted, prepared.full, target.timestamps)
        with self._stage("fuse"):
            result = dual_fusion(labels, {detector.name: detector.mae for detector in fitted})
        with self._stage("report"):
            grid = next(iter(labels.values())).timestamps
            report = self._report(
                result,
                [summarize_detector(detector, self.rule) for detector in fitted],
                mode="pipeline",
                grid=grid,
            )
            emit_report(report, self.output_dir)
        return report

    def run_fixture(self) -> AnomalyReport:
        """Fuse externally supplied votes and MAE values without fitting detectors"""
        remove_report(self.output_dir)
        with self._stage("load"):
            labels = labels_from_vote_table(self.config.fixture_votes)
            mae = load_mae_table(self.config.fixture_mae)
        with self._stage("fuse"):
            result = dual_fusion(labels, mae)
        with self._stage("report"):
            detectors = [DetectorSummary(name=name, mae=mae[name]) for name in labels]
            grid = next(iter(labels.values())).timestamps
            report = self._report(result, detectors, mode="fixture", grid=grid)
            emit_report(report, self.output_dir)
        return report

    def _report(self, result: FusionResult, detectors: List[DetectorSummary], mode: str, grid: np.ndarray) -> AnomalyReport:
        fixture = mode == "fixture"
        metadata = RunMetadata(
            mode=mode,
            config_hash=config_hash(self.config),
            seed=self.config.seed,
            target=None if fixture else self.config.resolved_target,
            mae_source="fixture-file" if fixture else self.config.mae_source,
            data_start=format_instant(grid[0]) if len(grid) else None,
            data_end=format_instant(grid[-1]) if len(grid) else None,
            n_scored=int(len(grid)),
        )
        return AnomalyReport(metadata=metadata, detectors=detectors, fusion=summarize_fusion(result))

    # persisted panels

    def fit_and_save(self) -> Tuple[PreparedData, List[FittedDetector]]:
        """Fit the panel and persist detectors plus normalization under <out>/models"""
        with self._stage("load"):
            series = self.load_series()
        with self._stage("preprocess"):
            prepared = self.prepare(series)
        with self._stage("fit"):
            fitted = self.fit_panel(prepared.train)
        with self._stage("evaluate"):
            fitted = self.attach_mae(fitted, prepared)
        with self._stage("save"):
            save_panel(fitted, prepared.stats, self.output_dir / MODELS_DIR)
        return prepared, fitted

    def score_and_save(self, path: Optional[Path] = None) -> Dict[str, LabelSeries]:
        """Score an input CSV with a persisted panel; writes labels_<name>.csv per detector"""
        with self._stage("load"):
            fitted, stats = load_panel(self.output_dir / MODELS_DIR)
            series = self.load_series(path)
        with self._stage("score"):
            normalized = zscore_apply(series, stats)
            labels = self.label_panel(fitted, normalized, normalized.timestamps)
        with self._stage("save"):
            for detector in fitted:
                scored = score(detector, normalized)
                keep = np.isin(scored.timestamps, labels[detector.name].timestamps)
                frame = pd.DataFrame({
                    'timestamp': [format_instant(instant) for instant in scored.timestamps[keep]],
                    'score': scored.scores[keep],
                    'label': labels[detector.name].labels,
                })
                write_atomic(
                    self.output_dir / f"labels_{detector.name}.csv", frame.to_csv(index=False, lineterminator="\n")
                )
        return labels


def save_panel(fitted: List[FittedDetector], stats: NormalizationStats, directory: Path) -> None:
    directory = Path(directory)
    names = []
    for detector in fitted:
        save_detector(detector, directory / f"{detector.name}.json")
        names.append(detector.name)
    write_atomic(directory / NORMALIZATION_FILE, json.dumps(stats.to_dict(), indent=2))
    # the panel file is written last and lists detectors in registration order
    write_atomic(directory / PANEL_FILE, json.dumps({'detectors': names}, indent=2))


def load_panel(directory: Path) -> Tuple[List[FittedDetector], NormalizationStats]:
    directory = Path(directory)
    try:
        with open(directory / PANEL_FILE, 'r', encoding='utf-8') as f:
            names = json.load(f)['detectors']
        with open(directory / NORMALIZATION_FILE, 'r', encoding='utf-8') as f:
            stats = NormalizationStats.from_dict(json.load(f))
    except (OSError, ValueError, KeyError) as e:
        raise PersistenceError(f"No usable fitted panel in {directory}: {e}") from e
    return [load_detector(directory / f"{name}.json") for name in names], stats
