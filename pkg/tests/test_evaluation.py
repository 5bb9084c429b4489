"""
Test suite for AUC computation.
The rank-based AUC is checked against the exhaustive pairwise counter and
scikit-learn.
"""
import numpy as np
import pytest
from sklearn.metrics import roc_auc_score

from modules.domain import RunResult
from modules.evaluation import EvaluationError, auc, pairwise_auc, per_batch_auc, stream_auc


@pytest.fixture
def result():
    """Three scored batches with labels."""
    rng = np.random.default_rng(0)
    scores, labels = [], []
    for _ in range(3):
        y = (rng.uniform(size=50) < 0.2).astype(int)
        y[0], y[1] = 0, 1
        scores.append(rng.normal(size=50) + y)
        labels.append(y)
    return RunResult(batch_indices=[1, 2, 3], scores=scores, labels=labels)


class TestAuc:
    """Test AUC as the probability an anomaly outranks a normal point."""

    def test_perfect_separation(self):
        """Test all anomalies above all normals gives 1.0."""
        assert auc([0.1, 0.2, 0.9, 1.0], [0, 0, 1, 1]) == 1.0

    def test_perfectly_inverted(self):
        """Test all anomalies below all normals gives 0.0."""
        assert auc([0.9, 1.0, 0.1, 0.2], [0, 0, 1, 1]) == 0.0

    def test_ties_count_half(self):
        """Test [1, 2, 2, 3] with labels [0, 0, 1, 1] gives 0.875."""
        assert auc([1, 2, 2, 3], [0, 0, 1, 1]) == 0.875
        assert pairwise_auc([1, 2, 2, 3], [0, 0, 1, 1]) == 0.875

    def test_all_tied(self):
        """Test constant scores give 0.5."""
        assert auc(np.ones(10), [0] * 5 + [1] * 5) == 0.5

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_pairwise_counter(self, seed):
        """Test rank AUC equals the exhaustive pair count, ties included."""
        rng = np.random.default_rng(seed)
        n = 5 + seed % 30
        labels = np.zeros(n, dtype=int)
        labels[rng.choice(n, size=1 + seed % 4, replace=False)] = 1
        scores = rng.integers(0, 6, size=n).astype(float)
        assert auc(scores, labels) == pytest.approx(pairwise_auc(scores, labels), abs=1e-12)

    def test_matches_sklearn(self):
        """Test agreement with scikit-learn's roc_auc_score."""
        rng = np.random.default_rng(1)
        labels = (rng.uniform(size=500) < 0.1).astype(int)
        scores = rng.normal(size=500) + labels
        assert auc(scores, labels) == pytest.approx(roc_auc_score(labels, scores), abs=1e-12)

    def test_monotone_transform_invariance(self):
        """Test exp() of the scores leaves the AUC unchanged."""
        rng = np.random.default_rng(2)
        labels = (rng.uniform(size=200) < 0.2).astype(int)
        scores = rng.normal(size=200) + labels
        assert auc(np.exp(scores), labels) == pytest.approx(auc(scores, labels), abs=1e-12)

    def test_negation_complements(self):
        """Test auc(s) + auc(-s) = 1 for tie-free scores."""
        rng = np.random.default_rng(3)
        labels = (rng.uniform(size=100) < 0.3).astype(int)
        scores = rng.normal(size=100)
        assert auc(scores, labels) + auc(-scores, labels) == pytest.approx(1.0, abs=1e-12)

    def test_single_class_rejected(self):
        """Test an all-normal label vector raises EvaluationError."""
        with pytest.raises(EvaluationError, match="at least one anomaly"):
            auc([0.1, 0.2], [0, 0])

    def test_length_mismatch_rejected(self):
        """Test unequal lengths raise EvaluationError."""
        with pytest.raises(EvaluationError, match="differ in length"):
            auc([0.1, 0.2, 0.3], [0, 1])

    def test_non_binary_labels_rejected(self):
        """Test labels other than 0/1 raise EvaluationError."""
        with pytest.raises(EvaluationError):
            auc([0.1, 0.2], [0, 2])


class TestStreamAuc:
    """Test the whole-stream AUC."""

    def test_concatenation_equivalence(self, result):
        """Test stream AUC equals auc of the concatenated vectors."""
        expected = auc(np.concatenate(result.scores), np.concatenate(result.labels))
        assert stream_auc(result) == expected

    def test_single_batch(self, result):
        """Test a one-batch result equals that batch's AUC."""
        single = RunResult(batch_indices=[1], scores=result.scores[:1], labels=result.labels[:1])
        assert stream_auc(single) == auc(result.scores[0], result.labels[0])

    def test_monotone_transform_invariance(self, result):
        """Test exp() on every batch leaves the stream AUC unchanged to 1e-12."""
        transformed = RunResult(
            batch_indices=result.batch_indices,
            scores=[np.exp(s) for s in result.scores],
            labels=result.labels,
        )
        assert stream_auc(transformed) == pytest.approx(stream_auc(result), abs=1e-12)

    def test_unlabeled_rejected(self):
        """Test a run without labels raises EvaluationError."""
        unlabeled = RunResult(batch_indices=[1], scores=[np.ones(3)], labels=[None])
        with pytest.raises(EvaluationError, match="no ground-truth"):
            stream_auc(unlabeled)


class TestPerBatchAuc:
    """Test per-batch AUC values."""

    def test_one_value_per_batch(self, result):
        """Test each scored batch gets its own AUC."""
        values = per_batch_auc(result)
        assert [index for index, _ in values] == [1, 2, 3]
        for (_, value), scores, labels in zip(values, result.scores, result.labels):
            assert value == auc(scores, labels)

    def test_single_class_batch_is_none(self, result):
        """Test a batch without anomalies yields None."""
        result.labels[1] = np.zeros(50, dtype=int)
        assert per_batch_auc(result)[1] == (2, None)
