"""
Test suite for CSV batch reading and synthetic drift stream generation.
"""
import logging

import numpy as np
import pandas as pd
import pytest

from modules.domain import Batch, ConceptSpec, DriftScenario, DriftSegment
from modules.scenario_config import ScenarioConfigError, preset_scenario
from modules.stream_source import StreamFormatError, generate_drift_stream, read_csv_stream, write_csv_stream


def two_concept_scenario(transition="abrupt", batch_size=64, seed=0, duration=5):
    """Concepts at -5 and +5 on both features, unit variance."""
    def concept(mean):
        return ConceptSpec(
            normal_mean=[mean, mean],
            normal_var=[1.0, 1.0],
            anomaly_mean=[0.0, 0.0],
            anomaly_var=[1.0, 1.0],
        )

    return DriftScenario(
        concepts=[concept(-5.0), concept(5.0)],
        schedule=[DriftSegment(0, duration, "abrupt"), DriftSegment(1, duration, transition)],
        dim=2,
        batch_size=batch_size,
        anomaly_ratio=0.05,
        seed=seed,
    )


def normal_mean(batch):
    return batch.data[batch.labels == 0].mean()


@pytest.fixture
def csv_file(tmp_path):
    """1025-row, 3-feature CSV with a label column."""
    rng = np.random.default_rng(0)
    frame = pd.DataFrame(rng.normal(size=(1025, 3)), columns=["a", "b", "c"])
    frame["label"] = 0
    path = tmp_path / "stream.csv"
    frame.to_csv(path, index=False)
    return path


class TestReadCsvStream:
    """Test fixed-size batch reading."""

    def test_trailing_partial_batch_dropped(self, csv_file, caplog):
        """Test 1025 rows at b=512 give 2 batches and a warning."""
        with caplog.at_level(logging.WARNING):
            batches = list(read_csv_stream(str(csv_file), 512, label_column="label"))
        assert len(batches) == 2
        assert [b.index for b in batches] == [0, 1]
        assert all(b.data.shape == (512, 3) for b in batches)
        assert "Dropping 1 trailing row" in caplog.text

    def test_all_zero_labels(self, csv_file):
        """Test an all-zero label column yields all-zero labels."""
        batches = list(read_csv_stream(str(csv_file), 512, label_column="label"))
        assert all(np.all(b.labels == 0) for b in batches)

    def test_without_label_column_every_column_is_a_feature(self, csv_file):
        """Test the label column is a feature when no label column is named."""
        batches = list(read_csv_stream(str(csv_file), 256))
        assert batches[0].dim == 4
        assert batches[0].labels is None

    def test_round_trip_bitwise(self, tmp_path):
        """Test a generated stream written to CSV reads back bitwise-equal."""
        original = list(generate_drift_stream(preset_scenario("abrupt", dim=4, batch_size=32, n_batches=4)))
        path = tmp_path / "generated.csv"
        assert write_csv_stream(original, str(path)) == 4

        restored = list(read_csv_stream(str(path), 32, label_column="label"))
        assert len(restored) == 4
        for a, b in zip(original, restored):
            assert np.array_equal(a.data, b.data)
            assert np.array_equal(a.labels, b.labels)

    def test_written_header(self, tmp_path):
        """Test the header is f0..f{d-1},label."""
        batch = Batch(data=np.zeros((2, 3)), index=0, labels=np.array([0, 1]))
        path = tmp_path / "out.csv"
        write_csv_stream([batch], str(path))
        assert path.read_text().splitlines()[0] == "f0,f1,f2,label"

    def test_non_numeric_cell_reports_position(self, tmp_path):
        """Test a bad cell is reported with its file row and column."""
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0,2.0\n3.0,oops\n")
        with pytest.raises(StreamFormatError, match="row 3, column 'b'"):
            list(read_csv_stream(str(path), 1))

    def test_missing_label_column(self, csv_file):
        """Test naming an absent label column raises StreamFormatError."""
        with pytest.raises(StreamFormatError, match="Label column 'target' not found"):
            list(read_csv_stream(str(csv_file), 512, label_column="target"))

    def test_labels_must_be_binary(self, tmp_path):
        """Test a label of 2 is rejected."""
        path = tmp_path / "labels.csv"
        path.write_text("a,b,label\n1,2,0\n3,4,2\n")
        with pytest.raises(StreamFormatError, match="row 3"):
            list(read_csv_stream(str(path), 1, label_column="label"))

    def test_missing_file(self, tmp_path):
        """Test a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            list(read_csv_stream(str(tmp_path / "nope.csv"), 8))

    def test_empty_file(self, tmp_path):
        """Test an empty file raises StreamFormatError."""
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(StreamFormatError):
            list(read_csv_stream(str(path), 8))

    def test_invalid_batch_size(self, csv_file):
        """Test batch_size < 1 is rejected."""
        with pytest.raises(StreamFormatError):
            list(read_csv_stream(str(csv_file), 0))


class TestGenerateDriftStream:
    """Test synthetic concept-drift streams."""

    def test_normal_anomaly_counts(self):
        """Test b=512 with ratio 0.01 gives 507 normals and 5 anomalies per batch."""
        scenario = preset_scenario("stationary", dim=4, batch_size=512, n_batches=3)
        for batch in generate_drift_stream(scenario):
            assert batch.size == 512
            assert int(batch.labels.sum()) == 5

    def test_total_batches_and_indices(self):
        """Test the stream length follows the schedule."""
        batches = list(generate_drift_stream(two_concept_scenario(duration=3)))
        assert [b.index for b in batches] == list(range(6))

    def test_abrupt_switch_moves_the_mean(self):
        """Test the per-batch mean jumps by far more than 5 standard errors."""
        batches = list(generate_drift_stream(two_concept_scenario("abrupt")))
        before, after = batches[4], batches[5]
        standard_error = np.sqrt(1.0 / (before.labels == 0).sum() + 1.0 / (after.labels == 0).sum())
        assert normal_mean(after) - normal_mean(before) > 5 * standard_error
        assert normal_mean(before) == pytest.approx(-5.0, abs=0.5)
        assert normal_mean(after) == pytest.approx(5.0, abs=0.5)

    def test_gradual_ends_in_new_concept(self):
        """Test a gradual segment starts mixed and ends fully in the new concept."""
        batches = list(generate_drift_stream(two_concept_scenario("gradual", duration=10)))
        first, last = batches[10], batches[19]
        old_share = np.mean(first.data[first.labels == 0, 0] < 0)
        assert old_share > 0.7
        assert np.all(last.data[last.labels == 0, 0] > 0)

    def test_incremental_moves_linearly(self):
        """Test incremental drift passes through the midpoint and ends at the new mean."""
        batches = list(generate_drift_stream(two_concept_scenario("incremental", duration=10)))
        # progress (t + 1) / 10: t = 4 is the midpoint
        assert normal_mean(batches[14]) == pytest.approx(0.0, abs=0.5)
        assert normal_mean(batches[19]) == pytest.approx(5.0, abs=0.5)

    def test_same_seed_identical(self):
        """Test determinism under a fixed seed."""
        a = list(generate_drift_stream(two_concept_scenario(seed=3)))
        b = list(generate_drift_stream(two_concept_scenario(seed=3)))
        for x, y in zip(a, b):
            assert np.array_equal(x.data, y.data)
            assert np.array_equal(x.labels, y.labels)

    def test_different_seed_differs(self):
        """Test a different seed changes the data."""
        a = next(generate_drift_stream(two_concept_scenario(seed=3)))
        b = next(generate_drift_stream(two_concept_scenario(seed=4)))
        assert not np.array_equal(a.data, b.data)

    def test_invalid_scenario_rejected(self):
        """Test an invalid scenario raises ScenarioConfigError."""
        scenario = two_concept_scenario()
        scenario.schedule[1].transition = "sideways"
        with pytest.raises(ScenarioConfigError):
            list(generate_drift_stream(scenario))
