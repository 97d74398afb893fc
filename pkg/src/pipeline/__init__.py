"""
Pipeline Module
Configuration, end-to-end runs, reports and the command line
"""

from .config import (
    PipelineConfig,
    SplitConfig,
    ThresholdConfig,
    DetectorConfig,
    SweepRangesConfig,
    load_config,
    config_hash,
)
from .report import (
    AnomalyReport,
    RunMetadata,
    DetectorSummary,
    FusionSummary,
    ProvenanceLine,
    AgreementLine,
    emit_report,
    load_report,
    summary_text,
)
from .runner import AnomalyPipeline, save_panel, load_panel
from .cli import main, build_parser, setup_logging

__all__ = [
    'PipelineConfig', 'SplitConfig', 'ThresholdConfig', 'DetectorConfig', 'SweepRangesConfig', 'load_config',
    'config_hash',
    'AnomalyReport', 'RunMetadata', 'DetectorSummary', 'FusionSummary', 'ProvenanceLine', 'AgreementLine',
    'emit_report', 'load_report', 'summary_text',
    'AnomalyPipeline', 'save_panel', 'load_panel',
    'main', 'build_parser', 'setup_logging',
]
