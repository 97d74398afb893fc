"""
Tests for CSV ingestion, resampling, normalization and splitting
"""

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.errors import ConfigError, DataError, IngestionError
from src.timeseries import (
    SplitSpec,
    TimeSeries,
    fill_missing,
    format_instant,
    load_csv,
    prepare_splits,
    resample,
    split,
    to_instants,
    zscore_apply,
    zscore_fit,
)


def _series(values, start="2024-01-01", freq="s"):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    timestamps = pd.date_range(start, periods=len(values), freq=freq).to_numpy()
    return TimeSeries(timestamps, tuple(f"c{j}" for j in range(values.shape[1])), values)


def _write(tmp_path, text, name="input.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_sorts_rows_and_keeps_missing_cells(self, tmp_path):
        path = _write(tmp_path, (
            "timestamp,temp,flow\n"
            "2020-12-09 10:00:02.000,3.0,30\n"
            "2020-12-09 10:00:00.000,1.0,\n"
            "2020-12-09 10:00:01.500,2.0,20\n"
        ))
        series = load_csv(path)

        assert series.channels == ("temp", "flow")
        assert [format_instant(t) for t in series.timestamps] == [
            "2020-12-09 10:00:00.000",
            "2020-12-09 10:00:01.500",
            "2020-12-09 10:00:02.000",
        ]
        assert series.values[:, 0].tolist() == [1.0, 2.0, 3.0]
        assert np.isnan(series.values[0, 1])

    def test_named_timestamp_column(self, tmp_path):
        path = _write(tmp_path, "a,when\n1.5,2024-01-01T00:00:00\n2.5,2024-01-01T00:00:01\n")
        series = load_csv(path, timestamp_column="when")
        assert series.channels == ("a",)
        assert series.n == 2

    def test_unparseable_timestamp_names_row(self, tmp_path):
        path = _write(tmp_path, "timestamp,a\n2024-01-01 00:00:00,1\nyesterday,2\n")
        with pytest.raises(IngestionError) as info:
            load_csv(path)
        assert info.value.row == 2
        assert "row 2" in str(info.value)

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        path = _write(tmp_path, "timestamp,a,b\n2024-01-01 00:00:00,1,2\n2024-01-01 00:00:01,1,oops\n")
        with pytest.raises(IngestionError) as info:
            load_csv(path)
        assert (info.value.row, info.value.column) == (2, "b")

    def test_duplicate_timestamp(self, tmp_path):
        path = _write(tmp_path, "timestamp,a\n2024-01-01 00:00:00,1\n2024-01-01 00:00:00,2\n")
        with pytest.raises(IngestionError, match="Duplicate"):
            load_csv(path)

    def test_missing_file_and_single_column(self, tmp_path):
        with pytest.raises(IngestionError, match="not found"):
            load_csv(tmp_path / "absent.csv")
        with pytest.raises(IngestionError):
            load_csv(_write(tmp_path, "timestamp\n2024-01-01\n"))

    def test_ingestion_error_is_a_data_error(self):
        assert IngestionError("x").exit_code == DataError.exit_code == 2


class TestFillAndResample:
    def test_fill_missing_forward_fills_and_drops_leading_rows(self):
        series = _series([[np.nan, 1.0], [2.0, np.nan], [np.nan, 3.0], [np.inf, 4.0]])
        filled = fill_missing(series)

        assert filled.n == 3
        assert filled.values.tolist() == [[2.0, 1.0], [2.0, 3.0], [2.0, 4.0]]

    def test_fill_missing_without_complete_row(self):
        series = _series([[np.nan, 1.0], [np.nan, 2.0]])
        with pytest.raises(DataError):
            fill_missing(series)

    def test_resample_buckets_are_anchored_half_open(self):
        timestamps = to_instants([
            "2024-01-01 00:00:00.000",
            "2024-01-01 00:00:00.400",
            "2024-01-01 00:00:01.200",
        ])
        series = TimeSeries(timestamps, ("a",), [1.0, 3.0, 10.0])
        resampled = resample(series, "1s")

        assert resampled.values[:, 0].tolist() == [2.0, 10.0]
        assert format_instant(resampled.timestamps[1]) == "2024-01-01 00:00:01.000"

    def test_resample_fills_empty_buckets_with_previous_row(self):
        timestamps = to_instants(["2024-01-01 00:00:00", "2024-01-01 00:00:02.500"])
        series = TimeSeries(timestamps, ("a",), [1.0, 5.0])
        resampled = resample(series, "1s")

        assert resampled.values[:, 0].tolist() == [1.0, 1.0, 5.0]

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, (24, 2), elements=st.floats(-1e6, 1e6)))
    def test_resample_at_own_interval_is_identity(self, values):
        series = _series(values, freq="250ms")
        assert resample(series, "250ms") == series

    def test_resampling_twice_changes_nothing(self):
        timestamps = to_instants(["2024-01-01 00:00:00", "2024-01-01 00:00:00.700", "2024-01-01 00:00:03.100"])
        once = resample(TimeSeries(timestamps, ("a",), [1.0, 2.0, 7.0]), "1s")
        assert resample(once, "1s") == once

    def test_resample_rejects_bad_settings(self):
        series = _series([1.0, 2.0])
        with pytest.raises(ConfigError):
            resample(series, "1s", aggregator="median")
        with pytest.raises(ConfigError):
            resample(series, "-1s")


class TestNormalization:
    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(5, 60), st.integers(1, 4)),
                  elements=st.floats(-1e3, 1e3, allow_nan=False)))
    def test_training_rows_have_zero_mean_unit_std(self, values):
        spread = np.ptp(values, axis=0)
        stds = values.std(axis=0)
        series = _series(values)
        stats = zscore_fit(series)
        normalized = zscore_apply(series, stats).values

        for j in range(values.shape[1]):
            if spread[j] == 0:
                assert np.all(normalized[:, j] == 0)
            elif stds[j] > 1e-3:
                assert abs(normalized[:, j].mean()) < 1e-9
                assert abs(normalized[:, j].std() - 1) < 1e-9

    def test_constant_channel_maps_to_zero(self, caplog):
        series = _series(np.column_stack([np.full(10, 7.0), np.arange(10.0)]))
        stats = zscore_fit(series)

        assert stats.constant_channel.tolist() == [True, False]
        assert np.all(zscore_apply(series, stats).values[:, 0] == 0)
        assert "Constant channels" in caplog.text

    def test_channel_mismatch(self):
        stats = zscore_fit(_series(np.arange(10.0)))
        other = TimeSeries(_series(np.arange(3.0)).timestamps, ("other",), np.arange(3.0))
        with pytest.raises(DataError, match="Channel mismatch"):
            zscore_apply(other, stats)

    def test_statistics_ignore_test_rows(self, sensors):
        spec = SplitSpec(train_fraction=0.8)
        tampered = np.array(sensors.values)
        tampered[1700:] *= 100.0

        baseline = prepare_splits(sensors, spec).stats
        leaked = prepare_splits(sensors.with_values(tampered), spec).stats
        assert baseline == leaked

    def test_statistics_ignore_validation_rows(self, sensors):
        # rows 600..899 are held out, the remaining 1700 split 1360/340
        spec = SplitSpec(validation_range=("2024-01-01 00:10:00", "2024-01-01 00:15:00"))
        tampered = np.array(sensors.values)
        tampered[600:900] *= 100.0
        tampered[1660:] -= 50.0

        baseline = prepare_splits(sensors, spec)
        leaked = prepare_splits(sensors.with_values(tampered), spec)
        assert baseline.validation.n == 300
        assert baseline.stats == leaked.stats
        assert baseline.train == leaked.train

    def test_stats_round_trip(self, sensors):
        stats = zscore_fit(sensors)
        assert type(stats).from_dict(stats.to_dict()) == stats


class TestSplit:
    def test_chronological_floor_split(self):
        train, test, validation = split(_series(np.arange(10.0)), SplitSpec(train_fraction=0.75))

        assert (train.n, test.n, validation.n) == (7, 3, 0)
        assert train.timestamps[-1] < test.timestamps[0]

    def test_validation_range_is_half_open(self):
        series = _series(np.arange(20.0))
        spec = SplitSpec(validation_range=("2024-01-01 00:00:05", "2024-01-01 00:00:10"))
        train, test, validation = split(series, spec)

        assert validation.values[:, 0].tolist() == [5.0, 6.0, 7.0, 8.0, 9.0]
        assert train.n + test.n == 15
        assert not np.isin(validation.timestamps, np.concatenate([train.timestamps, test.timestamps])).any()

    def test_validation_rows_leave_before_the_floor_split(self):
        spec = SplitSpec(train_fraction=0.8, validation_range=("2024-01-01 00:00:01", "2024-01-01 00:00:03"))
        train, test, validation = split(_series(np.arange(10.0)), spec)

        assert validation.values[:, 0].tolist() == [1.0, 2.0]
        assert train.values[:, 0].tolist() == [0.0, 3.0, 4.0, 5.0, 6.0, 7.0]
        assert test.values[:, 0].tolist() == [8.0, 9.0]

    def test_empty_partition(self):
        with pytest.raises(DataError):
            split(_series([1.0, 2.0]), SplitSpec(train_fraction=0.2))

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5, 1.5])
    def test_invalid_fraction(self, fraction):
        with pytest.raises(ConfigError):
            SplitSpec(train_fraction=fraction)

    def test_reversed_validation_range(self):
        with pytest.raises(ConfigError):
            SplitSpec(validation_range=("2024-01-02", "2024-01-01"))

    def test_prepared_partitions_share_training_statistics(self, sensors):
        prepared = prepare_splits(sensors, SplitSpec())

        assert prepared.train.n == 1600 and prepared.test.n == 400
        np.testing.assert_array_equal(prepared.full.values[:1600], prepared.train.values)
        np.testing.assert_array_equal(prepared.full.values[1600:], prepared.test.values)


class TestTimeSeries:
    def test_rejects_unsorted_timestamps(self):
        timestamps = to_instants(["2024-01-01 00:00:01", "2024-01-01 00:00:00"])
        with pytest.raises(DataError, match="strictly increasing"):
            TimeSeries(timestamps, ("a",), [1.0, 2.0])

    def test_values_are_read_only(self, sensors):
        with pytest.raises(ValueError):
            sensors.values[0, 0] = 1.0

    def test_frame_round_trip(self, sensors):
        assert TimeSeries.from_frame(sensors.to_frame()) == sensors
