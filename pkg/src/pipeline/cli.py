"""
Command Line Interface
run, fit, score, fuse and report subcommands with stable exit codes
"""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from ..errors import ConfigError, DualVoteError
from .config import PipelineConfig, load_config
from .report import emit_report, load_report
from .runner import AnomalyPipeline

EXIT_OK = 0
EXIT_INTERNAL = 3

LOG_FILE = "dualvote.log"

logger = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """Raises ConfigError instead of exiting so usage errors map to exit code 1"""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def setup_logging(output_dir: Path, verbose: bool = False) -> None:
    """Log to stderr and to dualvote.log in the output directory"""
    output_dir.mkdir(parents=True, exist_ok=True)
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(output_dir / LOG_FILE, encoding='utf-8'),
        ],
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="dualvote", description="Detector panel anomaly detection with dual voting fusion")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--config', type=Path, help='YAML configuration file')
        sub.add_argument('--out', type=Path, help='Output directory (overrides output_dir)')
        sub.add_argument('--verbose', '-v', action='store_true', help='Debug logging')

    run = subparsers.add_parser('run', help='End-to-end: ingest, fit, score, fuse, report')
    fit = subparsers.add_parser('fit', help='Fit the panel and persist it under <out>/models')
    score = subparsers.add_parser('score', help='Score a CSV with the panel persisted under <out>/models')
    for sub in (run, fit, score):
        common(sub)
        sub.add_argument('--input', type=Path, help='Input CSV (overrides input)')
        sub.add_argument('--seed', type=int, help='Pipeline seed (overrides seed)')
        sub.add_argument('--parallelism', type=int, help='Worker threads for the detector panel')
    run.add_argument('--fixture-votes', type=Path, help='Vote table; when given, run fuses it instead of fitting')
    run.add_argument('--fixture-mae', type=Path, help='MAE table used when mae_source is fixture-file')

    fuse = subparsers.add_parser('fuse', help='Fixture mode: fuse a vote table with an MAE table')
    common(fuse)
    fuse.add_argument('--fixture-votes', type=Path, help='Tab-separated timestamp x model vote table')
    fuse.add_argument('--fixture-mae', type=Path, help='Tab-separated model/mae table')
    fuse.add_argument('--seed', type=int, help='Seed recorded in the report')

    report = subparsers.add_parser('report', help='Re-render summary and CSV files from a report.json')
    report.add_argument('--input', type=Path, required=True, help='report.json to render')
    report.add_argument('--out', type=Path, help='Output directory (default: the report\'s directory)')
    report.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    return parser


def _config(args: argparse.Namespace) -> PipelineConfig:
    overrides = {
        'output_dir': args.out,
        'input': getattr(args, 'input', None),
        'seed': getattr(args, 'seed', None),
        'parallelism': getattr(args, 'parallelism', None),
        'fixture_votes': getattr(args, 'fixture_votes', None),
        'fixture_mae': getattr(args, 'fixture_mae', None),
    }
    return load_config(args.config, overrides)


def _dispatch(args: argparse.Namespace) -> None:
    if args.command == 'report':
        out = args.out or args.input.parent
        setup_logging(out, args.verbose)
        emit_report(load_report(args.input), out)
        return

    config = _config(args)
    setup_logging(Path(config.output_dir), args.verbose)
    pipeline = AnomalyPipeline(config)

    if args.command == 'fuse':
        if not config.fixture_mode:
            raise ConfigError("fuse needs --fixture-votes (or fixture_votes in the config)")
        report = pipeline.run_fixture()
    elif args.command == 'run':
        report = pipeline.run()
    elif args.command == 'fit':
        pipeline.fit_and_save()
        return
    else:
        pipeline.score_and_save()
        return

    logger.info(
        f"N = N_a + N_b = {report.fusion.n_a} + {report.fusion.n_b} = {report.fusion.n} "
        f"(report in {config.output_dir})"
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    try:
        args = build_parser().parse_args(argv)
        _dispatch(args)
    except DualVoteError as e:
        logger.error(str(e))
        return e.exit_code
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        return EXIT_INTERNAL
    return EXIT_OK
