"""
Anomaly Report
Structured run report, its human-readable summary and the CSV files written beside it
"""

import json
import logging
import os
import shutil
import tempfile
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from .. import __version__
from ..detectors import FittedDetector, LossHistory, ThresholdRule
from ..errors import DualVoteError, PersistenceError
from ..fusion import METHODS, FusionResult
from ..timeseries import format_instant

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
SUMMARY_FILE = "summary.txt"
FINAL = "final"

PathLike = Union[str, Path]


class RunMetadata(BaseModel):
    version: str = __version__
    mode: Literal["pipeline", "fixture"]
    config_hash: str
    seed: int
    target: Optional[str] = None
    mae_source: str
    data_start: Optional[str] = None
    data_end: Optional[str] = None
    n_scored: int = Field(ge=0)


class DetectorSummary(BaseModel):
    name: str
    kind: Optional[str] = None
    seed: Optional[int] = None
    hyperparameters: Dict[str, Union[int, float]] = Field(default_factory=dict)
    mae: float = Field(ge=0)
    threshold: Optional[float] = None
    train_error_mean: Optional[float] = None
    train_error_std: Optional[float] = None
    warmup: int = 0
    best_epoch: Optional[int] = None
    train_loss: List[float] = Field(default_factory=list)
    validation_loss: List[float] = Field(default_factory=list)


class ProvenanceLine(BaseModel):
    timestamp: str
    methods: List[str]
    models: List[str]
    support: int
    in_final: bool


class AgreementLine(BaseModel):
    first: str
    second: str
    jaccard: float = Field(ge=0, le=1)


class FusionSummary(BaseModel):
    model_names: List[str]
    W: List[float]
    R: List[int]
    RW: List[float]
    consensus: List[str]
    majority: List[str]
    weighted: List[str]
    rank: List[str]
    final: List[str]
    n_a: int
    n_b1: int
    n_b2a: int
    n_b2b: int
    n_b: int
    n: int
    selected_method: str
    provenance: List[ProvenanceLine] = Field(default_factory=list)
    agreement: List[AgreementLine] = Field(default_factory=list)

    @model_validator(mode='after')
    def _check_counts(self) -> "FusionSummary":
        if self.n != self.n_a + self.n_b:
            raise ValueError(f"N={self.n} differs from N_a + N_b = {self.n_a} + {self.n_b}")
        expected = {
            'consensus': self.n_a,
            'majority': self.n_b1,
            'weighted': self.n_b2a,
            'rank': self.n_b2b,
        }
        for method, count in expected.items():
            if len(getattr(self, method)) != count:
                raise ValueError(f"{method} lists {len(getattr(self, method))} instants but its count is {count}")
        return self

    def method_set(self, method: str) -> List[str]:
        return getattr(self, method)


class AnomalyReport(BaseModel):
    """Machine-readable outcome of one run"""
    metadata: RunMetadata
    detectors: List[DetectorSummary]
    fusion: FusionSummary


def summarize_detector(fitted: FittedDetector, rule: ThresholdRule) -> DetectorSummary:
    stats = fitted.train_error_stats
    return DetectorSummary(
        name=fitted.name,
        kind=fitted.spec.kind,
        seed=fitted.spec.seed,
        hyperparameters=dict(fitted.spec.hyperparameters),
        mae=fitted.mae,
        threshold=stats.threshold(rule),
        train_error_mean=stats.mean,
        train_error_std=stats.std,
        warmup=fitted.warmup,
        best_epoch=fitted.loss_history.best_epoch,
        train_loss=list(fitted.loss_history.train),
        validation_loss=list(fitted.loss_history.validation),
    )


def summarize_fusion(result: FusionResult) -> FusionSummary:
    def instants(values) -> List[str]:
        return [format_instant(value) for value in values]

    return FusionSummary(
        model_names=list(result.model_names),
        W=list(result.weights.W),
        R=list(result.weights.R),
        RW=list(result.weights.RW),
        consensus=instants(result.consensus_set),
        majority=instants(result.majority_set),
        weighted=instants(result.weighted_set),
        rank=instants(result.rank_set),
        final=instants(result.final_anomaly_set),
        n_a=result.n_a,
        n_b1=result.n_b1,
        n_b2a=result.n_b2a,
        n_b2b=result.n_b2b,
        n_b=result.n_b,
        n=result.n,
        selected_method=result.selected_method,
        provenance=[
            ProvenanceLine(
                timestamp=format_instant(entry.timestamp),
                methods=list(entry.methods),
                models=list(entry.models),
                support=entry.support,
                in_final=entry.in_final,
            )
            for entry in result.provenance
        ],
        agreement=[
            AgreementLine(first=a, second=b, jaccard=value) for (a, b), value in result.agreement.items()
        ],
    )


def summary_text(report: AnomalyReport) -> str:
    """Plain-text rendering of a report"""
    meta, fusion = report.metadata, report.fusion
    lines = [
        f"dualvote {meta.version} anomaly report ({meta.mode} mode)",
        f"config hash: {meta.config_hash}",
        f"seed: {meta.seed}",
        f"scored range: {meta.data_start or '-'} .. {meta.data_end or '-'} ({meta.n_scored} instants)",
        f"target: {meta.target or '-'}   mae source: {meta.mae_source}",
        "",
        "Detectors:",
    ]
    for detector in report.detectors:
        line = f"  {detector.name:<6} {detector.kind or '-':<26} mae={detector.mae:.6f}"
        if detector.threshold is not None:
            line += f" threshold={detector.threshold:.6f}"
        lines.append(line)

    lines += [
        "",
        "Weights:",
        f"  W  = {[round(w, 6) for w in fusion.W]}",
        f"  R  = {fusion.R}",
        f"  RW = {[round(rw, 6) for rw in fusion.RW]}",
        "",
        f"Consensus anomalies (N_a): {fusion.n_a}",
        f"Majority vote (N_b.1):     {fusion.n_b1}",
        f"Weighted vote (N_b.2a):    {fusion.n_b2a}",
        f"Rank vote (N_b.2b):        {fusion.n_b2b}",
        f"N_b = {fusion.n_b} ({fusion.selected_method})",
        f"N = N_a + N_b = {fusion.n_a} + {fusion.n_b} = {fusion.n}",
        "",
        "Final anomalies:",
    ]
    provenance = {line.timestamp: line for line in fusion.provenance}
    for instant in fusion.final:
        entry = provenance.get(instant)
        detail = f"  [{', '.join(entry.methods)}] voted by {', '.join(entry.models)}" if entry else ""
        lines.append(f"  {instant}{detail}")
    if not fusion.final:
        lines.append("  (none)")
    return "\n".join(lines) + "\n"


def _anomaly_frame(report: AnomalyReport, method: str) -> pd.DataFrame:
    if method != FINAL:
        return pd.DataFrame({'timestamp': report.fusion.method_set(method)})
    provenance = {line.timestamp: line for line in report.fusion.provenance}
    rows = [provenance[instant] for instant in report.fusion.final]
    return pd.DataFrame({
        'timestamp': [row.timestamp for row in rows],
        'methods': [";".join(row.methods) for row in rows],
        'models': [";".join(row.models) for row in rows],
        'support': [row.support for row in rows],
    }, columns=['timestamp', 'methods', 'models', 'support'])


def _report_files(report: AnomalyReport) -> Dict[str, str]:
    files = {
        SUMMARY_FILE: summary_text(report),
        REPORT_FILE: report.model_dump_json(indent=2) + "\n",
    }
    for method in METHODS + (FINAL,):
        files[f"anomalies_{method}.csv"] = _anomaly_frame(report, method).to_csv(index=False, lineterminator="\n")
    for detector in report.detectors:
        history = LossHistory(train=tuple(detector.train_loss), validation=tuple(detector.validation_loss))
        if not history:
            continue
        for which in ("train", "validation"):
            files[f"loss_{detector.name}_{which}.csv"] = history.curve(which).to_csv(index=False, lineterminator="\n")
    return files


def emit_report(report: AnomalyReport, directory: PathLike) -> List[Path]:
    """
    Write the summary, structured report, per-method anomaly CSVs and loss curves

    Files are staged in a temporary directory and moved into place only once
    all of them were written.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".dualvote-report-", dir=directory))
    except OSError as e:
        raise DualVoteError(f"Cannot prepare report directory {directory}: {e}") from e

    written = []
    try:
        files = _report_files(report)
        for name, text in files.items():
            target = staging / name
            try:
                with open(target, 'w', encoding='utf-8', newline='') as f:
                    f.write(text)
            except OSError as e:
                raise DualVoteError(f"Cannot write report file {target}: {e}") from e

        # report.json goes last so its presence means the set is complete
        for name in sorted(files, key=lambda item: item == REPORT_FILE):
            os.replace(staging / name, directory / name)
            written.append(directory / name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)

    logger.info(f"Wrote {len(written)} report files to {directory}")
    return written


def load_report(path: PathLike) -> AnomalyReport:
    """Parse a report.json written by emit_report"""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return AnomalyReport.model_validate(json.load(f))
    except OSError as e:
        raise PersistenceError(f"Cannot read report {path}: {e}") from e
    except (json.JSONDecodeError, ValidationError) as e:
        raise PersistenceError(f"Malformed report {path}: {e}") from e


def remove_report(directory: PathLike, detector_names: Sequence[str] = ()) -> None:
    """Delete report files a previous run left in `directory`"""
    directory = Path(directory)
    names = [REPORT_FILE, SUMMARY_FILE] + [f"anomalies_{method}.csv" for method in METHODS + (FINAL,)]
    for name in detector_names:
        names += [f"loss_{name}_train.csv", f"loss_{name}_validation.csv"]
    for name in names:
        if (directory / name).exists():
            (directory / name).unlink()
            logger.debug(f"Removed stale {directory / name}")
