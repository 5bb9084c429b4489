"""
Batch sources for streamdrift.

Reads fixed-size batches from CSV files and generates synthetic
concept-drift streams from a DriftScenario.
"""
import logging
from typing import Iterable, Iterator, Optional

import numpy as np
import pandas as pd

from modules.domain import Batch, ConceptSpec, DriftScenario
from modules.scenario_config import validate_scenario

logger = logging.getLogger(__name__)


class StreamFormatError(Exception):
    """Raised when a CSV stream cannot be parsed into numeric batches."""
    pass


def read_csv_stream(path: str, batch_size: int, label_column: Optional[str] = None) -> Iterator[Batch]:
    """
    Read a CSV file as consecutive batches of exactly batch_size rows.

    The file needs a header row; every column except the label column is
    a feature parsed as a 64-bit float. A trailing partial batch is dropped
    so every batch has the same size.

    Args:
        path: Path to a UTF-8, comma-separated file
        batch_size: Rows per batch
        label_column: Name of an optional 0/1 anomaly label column

    Yields:
        Batch objects in file order

    Raises:
        FileNotFoundError: If the file doesn't exist
        StreamFormatError: If a cell is not a finite number (reports row and
            column), the label column is missing, or labels are not 0/1
    """
    if batch_size < 1:
        raise StreamFormatError(f"batch_size must be positive (got {batch_size})")

    try:
        frame = pd.read_csv(path, encoding="utf-8", float_precision="round_trip")
    except FileNotFoundError:
        raise FileNotFoundError(f"Stream file not found: {path}")
    except pd.errors.EmptyDataError:
        raise StreamFormatError(f"Stream file is empty (no header row): {path}")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise StreamFormatError(f"Could not parse stream file {path}: {e}")

    labels = None
    if label_column is not None:
        if label_column not in frame.columns:
            raise StreamFormatError(f"Label column '{label_column}' not found in {path}")
        raw_labels = pd.to_numeric(frame[label_column], errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isin(raw_labels, (0.0, 1.0))
        if bad.any():
            row = int(np.argmax(bad))
            raise StreamFormatError(
                f"Label must be 0 or 1 at row {row + 2}, column '{label_column}' "
                f"(got {frame[label_column].iloc[row]!r})"
            )
        labels = raw_labels.astype(np.int64)
        frame = frame.drop(columns=[label_column])

    if frame.shape[1] == 0:
        raise StreamFormatError(f"Stream file has no feature columns: {path}")

    columns = []
    for column in frame.columns:
        values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            row = int(np.argmax(bad))
            # +2: one for the header line, one for 1-based numbering
            raise StreamFormatError(
                f"Non-numeric or non-finite value {frame[column].iloc[row]!r} "
                f"at row {row + 2}, column '{column}'"
            )
        columns.append(values)

    data = np.column_stack(columns)
    n_batches = data.shape[0] // batch_size
    dropped = data.shape[0] - n_batches * batch_size
    if dropped:
        logger.warning(f"Dropping {dropped} trailing row(s) that do not fill a batch of {batch_size}")

    for index in range(n_batches):
        rows = slice(index * batch_size, (index + 1) * batch_size)
        yield Batch(
            data=data[rows].copy(),
            index=index,
            labels=labels[rows].copy() if labels is not None else None,
        )


def write_csv_stream(batches: Iterable[Batch], path: str, label_column: str = "label") -> int:
    """
    Write batches to CSV (header f0..f{d-1}[,label], 17 significant digits).

    The label column is written only when every batch carries labels.

    Returns:
        Number of batches written
    """
    batches = list(batches)
    if not batches:
        raise StreamFormatError("No batches to write")

    data = np.vstack([batch.data for batch in batches])
    frame = pd.DataFrame(data, columns=[f"f{j}" for j in range(data.shape[1])])
    if all(batch.labels is not None for batch in batches):
        frame[label_column] = np.concatenate([batch.labels for batch in batches]).astype(np.int64)

    frame.to_csv(path, index=False, float_format="%.17g")
    return len(batches)


def _draw(rng: np.random.Generator, mean: np.ndarray, var: np.ndarray, n: int) -> np.ndarray:
    return mean + np.sqrt(var) * rng.standard_normal((n, mean.shape[0]))


def _vectors(concept: ConceptSpec):
    return (
        np.asarray(concept.normal_mean, dtype=np.float64),
        np.asarray(concept.normal_var, dtype=np.float64),
        np.asarray(concept.anomaly_mean, dtype=np.float64),
        np.asarray(concept.anomaly_var, dtype=np.float64),
    )


def generate_drift_stream(scenario: DriftScenario) -> Iterator[Batch]:
    """
    Generate labeled batches following the scenario's schedule.

    Each batch holds round(b * (1 - anomaly_ratio)) normal points and the
    rest anomalies, shuffled together. Entering a segment:
    - abrupt: the segment's concept from its first batch
    - gradual: each point comes from the new concept with probability
      rising linearly to 1 over the segment, otherwise from the previous one
    - incremental: means and variances move linearly from the previous
      concept to the new one over the segment
    The first segment has no previous concept and behaves as abrupt.
    Deterministic under scenario.seed.

    Raises:
        ScenarioConfigError: If the scenario is invalid
    """
    validate_scenario(scenario)
    rng = np.random.default_rng(scenario.seed)
    b = scenario.batch_size
    n_normal = int(round(b * (1.0 - scenario.anomaly_ratio)))
    n_anomaly = b - n_normal

    index = 0
    previous: Optional[int] = None
    for segment in scenario.schedule:
        new = _vectors(scenario.concepts[segment.concept])
        old = _vectors(scenario.concepts[previous]) if previous is not None else new

        for t in range(segment.duration):
            progress = (t + 1) / segment.duration

            if segment.transition == "incremental":
                mixed = [(1.0 - progress) * o + progress * n for o, n in zip(old, new)]
                normal = _draw(rng, mixed[0], mixed[1], n_normal)
                anomaly = _draw(rng, mixed[2], mixed[3], n_anomaly)
            elif segment.transition == "gradual":
                from_new = rng.random(b) < progress
                normal = np.where(
                    from_new[:n_normal, None],
                    _draw(rng, new[0], new[1], n_normal),
                    _draw(rng, old[0], old[1], n_normal),
                )
                anomaly = np.where(
                    from_new[n_normal:, None],
                    _draw(rng, new[2], new[3], n_anomaly),
                    _draw(rng, old[2], old[3], n_anomaly),
                )
            else:
                normal = _draw(rng, new[0], new[1], n_normal)
                anomaly = _draw(rng, new[2], new[3], n_anomaly)

            data = np.vstack([normal, anomaly])
            labels = np.concatenate([np.zeros(n_normal, dtype=np.int64), np.ones(n_anomaly, dtype=np.int64)])
            order = rng.permutation(b)
            yield Batch(data=data[order], index=index, labels=labels[order])
            index += 1

        previous = segment.concept
