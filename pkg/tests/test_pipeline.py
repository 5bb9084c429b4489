"""
Test suite for the prequential driver.
"""
import copy
import logging

import numpy as np
import pytest

from modules.autoencoder import DimensionMismatchError, latent
from modules.domain import Batch
from modules.model_pool import adapt, cka_similarity, init_pool, score_batch
from modules.pipeline import EmptyStreamError, run_prequential
from modules.scenario_config import build_separated_scenario
from modules.settings import EngineSettings
from modules.stream_source import generate_drift_stream


@pytest.fixture
def settings():
    """Small, fast engine settings."""
    return EngineSettings(batch_size=64, epochs_init=2, minibatch_size=16, latent_dim=2, hidden_layers=1, learning_rate=1e-2)


@pytest.fixture
def scenario():
    """Two concepts, three batches each, 64 points of dimension 8."""
    return build_separated_scenario(
        2, 8, 64, [(0, 3, "abrupt"), (1, 3, "abrupt")], anomaly_ratio=0.05, seed=1,
    )


@pytest.fixture
def recurrent_scenario():
    """Three concepts revisited twice."""
    schedule = [(c, 2, "abrupt") for c in (0, 1, 2, 0, 1, 2)]
    return build_separated_scenario(3, 8, 64, schedule, anomaly_ratio=0.05, seed=2)


class TestRunPrequential:
    """Test the test-then-train loop."""

    def test_first_batch_not_scored(self, scenario, settings):
        """Test batch 0 initializes the pool and every later batch is scored."""
        result = run_prequential(generate_drift_stream(scenario), settings)
        assert result.n_scored == 5
        assert result.batch_indices == [1, 2, 3, 4, 5]
        assert result.events[0].kind == "init"
        assert result.events[0].batch_index == 0

    def test_traces_aligned(self, scenario, settings):
        """Test every per-batch list has one entry per scored batch."""
        result = run_prequential(generate_drift_stream(scenario), settings)
        n = result.n_scored
        assert len(result.scores) == len(result.labels) == n
        assert len(result.reliability_trace) == len(result.pool_size_trace) == len(result.batch_seconds) == n
        assert len(result.events) == n + 1
        assert all(s.shape == (64,) for s in result.scores)
        assert all(0.0 < r <= 1.0 for r in result.reliability_trace)

    def test_events_match_traces(self, scenario, settings):
        """Test each event records the pool size and reliability of its batch."""
        result = run_prequential(generate_drift_stream(scenario), settings)
        for event, size, reliability, index in zip(
            result.events[1:], result.pool_size_trace, result.reliability_trace, result.batch_indices
        ):
            assert event.pool_size == size
            assert event.pool_reliability == reliability
            assert event.batch_index == index
            assert event.kind in ("minor", "major")
            assert "inference" in event.timings

    def test_scores_come_from_pre_update_snapshot(self, scenario, settings):
        """Test batch t is scored by the pool as it was before adapting to batch t."""
        snapshots = []

        def observer(batch, pool, scores):
            snapshots.append((batch.data.copy(), copy.deepcopy(pool), scores.copy()))

        run_prequential(generate_drift_stream(scenario), settings, observer=observer)
        assert len(snapshots) == 5
        for data, pool, scores in snapshots:
            rescored, _ = score_batch(pool, data, settings.inference_mode)
            np.testing.assert_array_equal(rescored, scores)

    def test_every_batch_is_learned_once(self, scenario, settings):
        """Test the pool has absorbed exactly the batches before t when batch t is scored."""
        seen = []

        def observer(batch, pool, scores):
            seen.append((batch.index, sum(m.num_batches for m in pool.models)))

        run_prequential(generate_drift_stream(scenario), settings, observer=observer)
        assert seen == [(t, t) for t in range(1, 6)]

    def test_deterministic(self, scenario, settings):
        """Test identical inputs give identical scores and events."""
        a = run_prequential(generate_drift_stream(scenario), settings)
        b = run_prequential(generate_drift_stream(scenario), settings)
        for x, y in zip(a.scores, b.scores):
            np.testing.assert_array_equal(x, y)
        assert [e.to_dict() for e in a.events] == [e.to_dict() for e in b.events]

    def test_unlabeled_stream(self, settings):
        """Test a stream without labels runs and has no labels."""
        rng = np.random.default_rng(0)
        stream = [Batch(data=rng.normal(size=(64, 4)), index=i) for i in range(3)]
        result = run_prequential(stream, settings)
        assert result.n_scored == 2
        assert not result.has_labels

    def test_single_model_inference_mode(self, scenario, settings):
        """Test the single-model ablation runs end to end."""
        result = run_prequential(generate_drift_stream(scenario), settings.with_overrides(inference_mode="single_model"))
        assert result.n_scored == 5

    def test_baseline_never_grows(self, scenario, settings):
        """Test max_pool_size=1 keeps a single model and only minor updates."""
        result = run_prequential(generate_drift_stream(scenario), settings.with_overrides(max_pool_size=1))
        assert result.pool_size_trace == [1] * 5
        assert result.major_updates == 0

    def test_two_batch_stationary_stream(self):
        """Test one scored batch whose event is a minor update in at least 4 of 5 seeds."""
        minor_runs = 0
        for seed in range(5):
            scenario = build_separated_scenario(1, 16, 512, [(0, 2, "abrupt")], seed=seed)
            result = run_prequential(generate_drift_stream(scenario), EngineSettings(seed=seed))
            assert result.n_scored == 1
            assert len(result.events) == 2
            minor_runs += result.events[1].kind == "minor"
        assert minor_runs >= 4

    def test_empty_stream(self, settings):
        """Test a stream with no batches raises EmptyStreamError."""
        with pytest.raises(EmptyStreamError, match="no batches"):
            run_prequential(iter([]), settings)

    def test_single_batch_stream(self, settings):
        """Test one batch is not enough to score anything."""
        stream = [Batch(data=np.random.default_rng(0).normal(size=(64, 4)), index=0)]
        with pytest.raises(EmptyStreamError, match="single batch"):
            run_prequential(stream, settings)

    def test_shape_change_rejected(self, settings):
        """Test a batch with a different shape raises DimensionMismatchError."""
        rng = np.random.default_rng(0)
        stream = [Batch(data=rng.normal(size=(64, 4)), index=0), Batch(data=rng.normal(size=(64, 5)), index=1)]
        with pytest.raises(DimensionMismatchError, match="Batch 1"):
            run_prequential(stream, settings)


class TestCompactionInvariant:
    """Test the pool stays compact after every major update."""

    def test_instrumented_run(self, recurrent_scenario, settings):
        """Test no model is gamma-similar to the newest model after each major update."""
        batches = list(generate_drift_stream(recurrent_scenario))
        pool, _ = init_pool(batches[0].data, settings)
        majors = 0
        for batch in batches[1:]:
            _, reliabilities = score_batch(pool, batch.data, settings.inference_mode)
            pool, event = adapt(pool, batch.data, reliabilities, settings, batch_index=batch.index)
            if event.kind != "major":
                continue
            majors += 1
            newest = next(m for m in pool.models if m.id == event.model_id)
            z_new = latent(newest.ae, batch.data)
            for model in pool.models:
                if model is not newest:
                    assert cka_similarity(z_new, latent(model.ae, batch.data)) < pool.gamma
        assert majors >= 1


class TestPipelineLogging:
    """Test run lifecycle logging."""

    def test_logs_start_and_summary(self, scenario, settings, caplog):
        """Test the run logs its start and a summary."""
        with caplog.at_level(logging.INFO, logger="modules.pipeline"):
            run_prequential(generate_drift_stream(scenario), settings)
        assert "Starting prequential run" in caplog.text
        assert "Run complete: 5 scored batches" in caplog.text
