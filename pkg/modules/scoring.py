"""
Score statistics and reliability arithmetic for streamdrift.

A model's reliability on the current batch is the Hoeffding bound on the
difference between its mean score now and its mean score on the last batch
it was trained on. Shared by concept-driven inference and drift detection.
"""
import math
from typing import Sequence

import numpy as np

from modules.domain import ScoreStats


class ScoringError(Exception):
    """Raised when score vectors or statistics violate scoring preconditions."""
    pass


def _as_scores(scores: Sequence[float]) -> np.ndarray:
    values = np.asarray(scores, dtype=np.float64).ravel()
    if values.size == 0:
        raise ScoringError("Score vector is empty")
    if not np.all(np.isfinite(values)):
        raise ScoringError("Score vector contains non-finite values")
    return values


def compute_stats(scores: Sequence[float]) -> ScoreStats:
    """
    Min, max, mean and length of a score vector.

    Example:
        >>> compute_stats([1.0, 2.0, 3.0])
        ScoreStats(s_min=1.0, s_max=3.0, avg=2.0, count=3)
    """
    values = _as_scores(scores)
    s_min = float(values.min())
    s_max = float(values.max())
    # Rounding in the mean must not push it outside [min, max]
    avg = min(max(float(values.mean()), s_min), s_max)
    return ScoreStats(s_min=s_min, s_max=s_max, avg=avg, count=int(values.size))


def hoeffding_bound(epsilon: float, n: int, m: int, a_min: float, a_max: float) -> float:
    """
    Bound on Pr{|mean(X) - mean(Y)| >= epsilon} for samples of size n and m
    bounded by [a_min, a_max].
    """
    if n < 1 or m < 1:
        raise ScoringError(f"Sample sizes must be positive (got n={n}, m={m})")
    if epsilon == 0.0:
        return 1.0
    spread = a_max - a_min
    if spread <= 0.0:
        raise ScoringError("Bound is undefined for a zero-width range with epsilon > 0")
    # 2nm / (n + m) == n when n == m; squaring the ratio keeps tiny scales finite
    exponent = -2.0 * n * m / (n + m) * (epsilon / spread) ** 2
    return math.exp(exponent)


def model_reliability(curr: ScoreStats, last: ScoreStats) -> float:
    """
    Reliability of a model for the current batch, in (0, 1].

    r = exp(-b * eps^2 / (s_max - s_min)^2) with eps the difference of the
    two batch means and the range taken over both batches. Equals 1 exactly
    when the means coincide (which is forced when the range is zero).
    Underflow is clamped to the smallest positive double.

    Raises:
        ScoringError: If the two statistics cover different batch sizes
    """
    if curr.count != last.count:
        raise ScoringError(
            f"Reliability needs equal batch sizes (current {curr.count}, last {last.count})"
        )

    epsilon = abs(curr.avg - last.avg)
    if epsilon == 0.0:
        return 1.0

    s_max = max(curr.s_max, last.s_max)
    s_min = min(curr.s_min, last.s_min)
    reliability = hoeffding_bound(epsilon, curr.count, last.count, s_min, s_max)
    return max(reliability, np.finfo(np.float64).tiny)


def standardize(scores: Sequence[float]) -> np.ndarray:
    """
    z-scores using the population standard deviation.

    A constant vector carries no evidence of abnormality and maps to zeros.
    """
    values = _as_scores(scores)
    std = values.std()
    if std == 0.0:
        return np.zeros_like(values)
    return (values - values.mean()) / std
