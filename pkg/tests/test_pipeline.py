"""
End-to-end runs, configuration, reports and the command line
"""

import json
import math
from pathlib import Path

import pandas as pd
import pytest
from pydantic import ValidationError

from src.errors import ConfigError, StageError
from src.pipeline import (
    AnomalyPipeline,
    FusionSummary,
    PipelineConfig,
    config_hash,
    load_config,
    load_report,
    main,
)
from src.timeseries import format_instant
from tests.conftest import COOLING_MAE, COOLING_VOTES
from tests.synthetic import sinusoid_sensors, spike_run, write_csv

QUICK_CONFIG = """
detectors:
  - kind: window-linear-autoencoder
    hyperparameters: {window: 4, latent: 2, max_epochs: 5}
  - kind: pca-reconstructor
  - kind: seasonal-residual
  - kind: moving-average-residual
  - kind: knn-distance
sweep_ranges:
  max_epochs: [1, 500]
"""

REPORT_FILES = [
    "summary.txt",
    "report.json",
    "anomalies_consensus.csv",
    "anomalies_majority.csv",
    "anomalies_weighted.csv",
    "anomalies_rank.csv",
    "anomalies_final.csv",
]


def _quick_config(tmp_path, extra=""):
    path = tmp_path / "config.yaml"
    path.write_text(QUICK_CONFIG + extra, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def spike_report(tmp_path_factory):
    root = tmp_path_factory.mktemp("spikes")
    series, spikes = spike_run(n=10_000, count=10, seed=0)
    config = PipelineConfig(input=write_csv(series, root / "sensors.csv"), output_dir=root / "out", seed=0)
    return AnomalyPipeline(config).run(), [format_instant(t) for t in spikes], root / "out"


class TestEndToEnd:
    def test_injected_spikes_are_found(self, spike_report):
        report, spikes, _ = spike_report
        assert len(set(spikes) & set(report.fusion.final)) >= 9

    def test_counts_add_up(self, spike_report):
        fusion = spike_report[0].fusion
        assert fusion.n == fusion.n_a + fusion.n_b == len(fusion.final)
        assert fusion.n_b in (fusion.n_b1, fusion.n_b2a, fusion.n_b2b)

    def test_report_files(self, spike_report):
        report, _, out = spike_report
        for name in REPORT_FILES:
            assert (out / name).is_file()
        assert (out / "loss_M1_train.csv").read_text(encoding="utf-8").startswith("epoch,loss\n")
        assert not (out / "loss_M2_train.csv").exists()
        assert not any(p.name.startswith(".dualvote-report-") for p in out.iterdir())
        assert load_report(out / "report.json") == report

    def test_final_csv_carries_provenance(self, spike_report):
        report, _, out = spike_report
        lines = (out / "anomalies_final.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "timestamp,methods,models,support"
        assert len(lines) == report.fusion.n + 1

    def test_metadata(self, spike_report):
        metadata = spike_report[0].metadata
        assert (metadata.mode, metadata.target, metadata.mae_source) == ("pipeline", "test", "test")
        assert metadata.n_scored == 2000
        assert len(metadata.config_hash) == 64

    def test_detector_summaries(self, spike_report):
        detectors = spike_report[0].detectors
        assert [d.name for d in detectors] == ["M1", "M2", "M3", "M4", "M5"]
        assert all(d.mae >= 0 and d.threshold is not None for d in detectors)
        assert detectors[0].best_epoch is not None

    def test_clean_series_raises_few_alarms(self, tmp_path):
        config = PipelineConfig(
            input=write_csv(sinusoid_sensors(n=10_000, seed=11), tmp_path / "clean.csv"),
            output_dir=tmp_path / "out",
            threshold={'kind': 'quantile', 'quantile': 0.999},
        )
        report = AnomalyPipeline(config).run()
        assert report.metadata.n_scored == 2000
        assert report.fusion.n <= math.ceil(0.001 * report.metadata.n_scored)

    def test_validation_target(self, tmp_path, sensors_csv):
        config_path = _quick_config(tmp_path, (
            "split:\n"
            "  validation_start: '2024-01-01 00:25:00'\n"
            "  validation_end: '2024-01-01 00:30:00'\n"
            "mae_source: validation\n"
        ))
        config = load_config(config_path, {'input': sensors_csv, 'output_dir': tmp_path / "out"})
        report = AnomalyPipeline(config).run()

        assert report.metadata.target == "validation"
        assert report.metadata.n_scored == 300
        assert report.metadata.data_start == "2024-01-01 00:25:00.000"

    def test_missing_input_is_a_load_stage_error(self, tmp_path):
        config = PipelineConfig(input=tmp_path / "absent.csv", output_dir=tmp_path / "out")
        with pytest.raises(StageError) as info:
            AnomalyPipeline(config).run()
        assert (info.value.stage, info.value.exit_code) == ("load", 2)
        assert not (tmp_path / "out" / "report.json").exists()


def test_runs_are_identical_across_parallelism(tmp_path, sensors_csv):
    config_path = _quick_config(tmp_path)
    reports = []
    for parallelism in (1, 5):
        out = tmp_path / f"out{parallelism}"
        code = main(["run", "--config", str(config_path), "--input", str(sensors_csv),
                     "--out", str(out), "--parallelism", str(parallelism), "--seed", "17"])
        assert code == 0
        reports.append((out / "report.json").read_bytes())
    assert reports[0] == reports[1]


class TestFixtureMode:
    def test_fuse_command(self, tmp_path):
        out = tmp_path / "out"
        code = main(["fuse", "--fixture-votes", str(COOLING_VOTES), "--fixture-mae", str(COOLING_MAE),
                     "--out", str(out)])
        assert code == 0

        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert (report['fusion']['n_a'], report['fusion']['n_b'], report['fusion']['n']) == (6, 4, 10)
        assert report['metadata']['mode'] == "fixture"
        consensus = (out / "anomalies_consensus.csv").read_text(encoding="utf-8").splitlines()
        assert consensus[0] == "timestamp" and len(consensus) == 7
        assert "N = N_a + N_b = 6 + 4 = 10" in (out / "summary.txt").read_text(encoding="utf-8")

    def test_run_with_fixture_votes_in_config(self, tmp_path):
        config = load_config(None, {
            'fixture_votes': COOLING_VOTES, 'fixture_mae': COOLING_MAE, 'output_dir': tmp_path / "out",
        })
        assert AnomalyPipeline(config).run().fusion.n == 10

    def test_run_command_accepts_fixture_votes(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--fixture-votes", str(COOLING_VOTES), "--fixture-mae", str(COOLING_MAE),
                     "--out", str(out)]) == 0
        assert load_report(out / "report.json").fusion.n == 10

    def test_empty_result_writes_header_only_files(self, tmp_path):
        votes = tmp_path / "votes.tsv"
        votes.write_text("timestamp\tM1\tM2\n2024-01-01 00:00:00\t0\t0\n2024-01-01 00:00:01\t0\t0\n",
                         encoding="utf-8")
        mae = tmp_path / "mae.tsv"
        mae.write_text("model\tmae\nM1\t0.1\nM2\t0.2\n", encoding="utf-8")
        out = tmp_path / "out"

        assert main(["fuse", "--fixture-votes", str(votes), "--fixture-mae", str(mae), "--out", str(out)]) == 0
        assert (out / "anomalies_final.csv").read_text(encoding="utf-8") == "timestamp,methods,models,support\n"
        assert (out / "anomalies_majority.csv").read_text(encoding="utf-8") == "timestamp\n"
        assert load_report(out / "report.json").fusion.n == 0

    def test_fuse_without_mae_is_a_config_error(self, tmp_path):
        assert main(["fuse", "--fixture-votes", str(COOLING_VOTES), "--out", str(tmp_path)]) == 1


class TestCommandLine:
    @pytest.mark.parametrize("argv", [[], ["bogus"], ["run", "--no-such-flag"], ["report"]])
    def test_usage_errors(self, argv):
        assert main(argv) == 1

    def test_missing_input_exits_with_data_error(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--input", str(tmp_path / "absent.csv"), "--out", str(out)]) == 2
        assert not (out / "report.json").exists()
        assert (out / "dualvote.log").is_file()

    def test_bad_config(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("threshold: {k: -1}\n", encoding="utf-8")
        assert main(["run", "--config", str(path), "--out", str(tmp_path / "out")]) == 1

        path.write_text("detectors: [{kind: lstm}]\n", encoding="utf-8")
        assert main(["run", "--config", str(path), "--out", str(tmp_path / "out")]) == 1

        path.write_text("detectors: [{kind: pca-reconstructor, hyperparameters: {window: 100}}]\n", encoding="utf-8")
        assert main(["run", "--config", str(path), "--out", str(tmp_path / "out")]) == 1

    def test_fit_then_score(self, tmp_path, sensors_csv):
        out = tmp_path / "out"
        config_path = _quick_config(tmp_path)
        assert main(["fit", "--config", str(config_path), "--input", str(sensors_csv), "--out", str(out)]) == 0
        assert json.loads((out / "models" / "panel.json").read_text(encoding="utf-8")) == {
            'detectors': ["M1", "M2", "M3", "M4", "M5"]
        }

        assert main(["score", "--config", str(config_path), "--input", str(sensors_csv), "--out", str(out)]) == 0
        lines = (out / "labels_M3.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "timestamp,score,label"
        assert all(line.rsplit(",", 1)[1] in ("0", "1") for line in lines[1:])

        frame = pd.read_csv(out / "labels_M3.csv")
        assert list(frame.columns) == ["timestamp", "score", "label"]
        assert len(frame) == len(lines) - 1
        assert (frame['score'] >= 0).all()
        assert frame['timestamp'].str.fullmatch(r"\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\.\d{3}").all()

    def test_score_without_fitted_panel(self, tmp_path, sensors_csv):
        assert main(["score", "--input", str(sensors_csv), "--out", str(tmp_path / "out")]) == 2

    def test_report_command_rerenders(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["fuse", "--fixture-votes", str(COOLING_VOTES), "--fixture-mae", str(COOLING_MAE),
                     "--out", str(first)]) == 0
        assert main(["report", "--input", str(first / "report.json"), "--out", str(second)]) == 0

        for name in REPORT_FILES:
            assert (second / name).read_bytes() == (first / name).read_bytes()

    def test_report_command_rejects_malformed_json(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text("{}", encoding="utf-8")
        assert main(["report", "--input", str(path)]) == 2


class TestConfig:
    def test_overrides_replace_file_values(self, tmp_path):
        path = _quick_config(tmp_path, "seed: 5\n")
        assert load_config(path, {'seed': None}).seed == 5
        assert load_config(path, {'seed': 9}).seed == 9

    def test_defaults(self):
        config = load_config()
        assert [spec.name for spec in config.panel()] == ["M1", "M2", "M3", "M4", "M5"]
        assert config.resolved_target == "test"
        assert not config.fixture_mode

    @pytest.mark.parametrize("data", [
        {'unknown': 1},
        {'target': 'validation'},
        {'mae_source': 'fixture-file'},
        {'fixture_votes': 'votes.tsv'},
        {'detectors': [{'kind': 'knn-distance', 'name': 'a'}, {'kind': 'pca-reconstructor', 'name': 'a'}]},
        {'detectors': [{'kind': 'pca-reconstructor', 'hyperparameters': {'neighbors': 3}}]},
        {'detectors': [{'kind': 'pca-reconstructor', 'hyperparameters': {'window': 100}}]},
        {'detectors': [{'kind': 'window-linear-autoencoder', 'hyperparameters': {'max_epochs': 5}}]},
        {'detectors': [{'kind': 'knn-distance', 'grid': {'window': [4, 30]}}]},
        {'sweep_ranges': {'window': [5, 2]}},
        {'split': {'validation_start': '2024-01-01'}},
        {'sweep_folds': 1},
        {'parallelism': 0},
    ])
    def test_invalid_settings(self, data):
        with pytest.raises(ConfigError):
            load_config(None, data)

    def test_sweep_ranges_bound_the_panel(self):
        fast = {'detectors': [{'kind': 'window-linear-autoencoder', 'hyperparameters': {'max_epochs': 5}}]}
        with pytest.raises(ConfigError, match="outside sweep range"):
            load_config(None, fast)

        config = load_config(None, {**fast, 'sweep_ranges': {'max_epochs': [1, 500]}})
        assert config.panel()[0].hp('max_epochs') == 5
        assert config.sweep_ranges.to_ranges().max_epochs == (1, 500)
        assert config.sweep_ranges.to_ranges().window == (1, 24)

    def test_unreadable_yaml(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("detectors: [\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="YAML"):
            load_config(path)
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.yaml")

    def test_hash_ignores_output_dir_and_parallelism(self):
        base = PipelineConfig(seed=3)
        assert config_hash(base) == config_hash(PipelineConfig(seed=3, output_dir=Path("elsewhere"), parallelism=4))
        assert config_hash(base) != config_hash(PipelineConfig(seed=4))

    def test_detector_seeds_follow_the_pipeline_seed(self):
        first, second = PipelineConfig(seed=1).panel(), PipelineConfig(seed=2).panel()
        assert all(a.seed != b.seed for a, b in zip(first, second))

    def test_example_config_is_valid(self):
        example = Path(__file__).resolve().parent.parent / "data" / "config.example.yaml"
        config = load_config(example)
        assert [d.name for d in config.detectors] == ["M1", "M2", "M3", "M4", "M5"]
        assert config.grids()["M2"] == {'latent': [1, 2, 3]}


def test_fusion_summary_rejects_inconsistent_counts():
    payload = dict(
        model_names=["M1"], W=[0.5], R=[1], RW=[1.0],
        consensus=["2024-01-01 00:00:00.000"], majority=[], weighted=[], rank=[],
        final=["2024-01-01 00:00:00.000"],
        n_a=1, n_b1=0, n_b2a=0, n_b2b=0, n_b=0, n=2, selected_method="majority",
    )
    with pytest.raises(ValidationError):
        FusionSummary(**payload)
    payload['n'] = 1
    assert FusionSummary(**payload).n == 1
