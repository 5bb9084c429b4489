"""
Detection accuracy metrics for streamdrift.

AUC as the probability that a random anomaly outranks a random normal
point, ties counted half.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from modules.domain import RunResult


class EvaluationError(Exception):
    """Raised when scores and labels cannot be evaluated."""
    pass


def _check(scores: Sequence[float], labels: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise EvaluationError(f"Scores and labels differ in length ({scores.size} vs {labels.size})")
    if not np.all(np.isin(labels, (0, 1))):
        raise EvaluationError("Labels must be 0 (normal) or 1 (anomaly)")
    positives = int(labels.sum())
    if positives == 0 or positives == labels.size:
        raise EvaluationError("AUC needs at least one anomaly and one normal label")
    return scores, labels.astype(np.int64)


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """
    Area under the ROC curve via average ranks (O(n log n)).

    Example:
        >>> auc([1, 2, 2, 3], [0, 0, 1, 1])
        0.875
    """
    scores, labels = _check(scores, labels)
    ranks = pd.Series(scores).rank(method="average").to_numpy()
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def pairwise_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Exhaustive O(n^2) pair count; reference implementation of auc()."""
    scores, labels = _check(scores, labels)
    positives = scores[labels == 1]
    negatives = scores[labels == 0]
    favorable = 0.0
    for p in positives:
        for n in negatives:
            if p > n:
                favorable += 1.0
            elif p == n:
                favorable += 0.5
    return favorable / (positives.size * negatives.size)


def stream_auc(result: RunResult) -> float:
    """AUC over all scored points of a run, batches concatenated."""
    if not result.has_labels:
        raise EvaluationError("Run has no ground-truth labels")
    return auc(np.concatenate(result.scores), np.concatenate(result.labels))


def per_batch_auc(result: RunResult) -> List[Tuple[int, Optional[float]]]:
    """AUC of every scored batch; None where a batch holds a single class."""
    if not result.has_labels:
        raise EvaluationError("Run has no ground-truth labels")

    values = []
    for index, scores, labels in zip(result.batch_indices, result.scores, result.labels):
        try:
            values.append((index, auc(scores, labels)))
        except EvaluationError:
            values.append((index, None))
    return values
