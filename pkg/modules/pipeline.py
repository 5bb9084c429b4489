"""
Prequential driver for streamdrift.

Runs the test-then-train loop end to end: the first batch builds the pool,
every later batch is scored by the pool first and then used to adapt it.
"""
import logging
import time
from typing import Callable, Iterable, Optional

import numpy as np

from modules.autoencoder import DimensionMismatchError
from modules.domain import Batch, RunResult
from modules.model_pool import ModelPool, adapt, init_pool, pool_reliability, score_batch
from modules.settings import EngineSettings

# Configure logging
logger = logging.getLogger(__name__)


class EmptyStreamError(Exception):
    """Raised when a stream yields fewer than two batches."""
    pass


# Called after a batch is scored and before the pool adapts to it
ScoreObserver = Callable[[Batch, ModelPool, np.ndarray], None]


def run_prequential(
    stream: Iterable[Batch],
    settings: EngineSettings,
    observer: Optional[ScoreObserver] = None,
) -> RunResult:
    """
    Run the adaptive pool over a stream of equal-sized batches.

    Pipeline sequence:
    1. Batch 0: initialize the pool (no scores emitted)
    2. Every later batch:
       a. Score it with the current pool (concept-driven or single-model)
       b. Record the pool reliability
       c. Adapt the pool (minor or major update)
    3. Record wall-clock time of a+b+c per batch

    Args:
        stream: Batches in stream order
        settings: Engine settings
        observer: Optional hook receiving (batch, pool, scores) between
            scoring and adaptation

    Returns:
        RunResult with scores, labels, traces, events and timings

    Raises:
        EmptyStreamError: If the stream yields fewer than two batches
        DimensionMismatchError: If a batch's shape differs from the first
    """
    iterator = iter(stream)
    first = next(iterator, None)
    if first is None:
        raise EmptyStreamError("Stream yielded no batches")

    logger.info(f"Starting prequential run: batch size {first.size}, dim {first.dim}")
    logger.info(
        f"  alpha={settings.alpha}, gamma={settings.gamma}, inference={settings.inference_mode}, "
        f"merge={settings.merge_mode}, max_pool_size={settings.max_pool_size}"
    )

    try:
        pool, init_event = init_pool(first.data, settings, batch_index=first.index)
    except Exception as e:
        logger.error(f"Failed to initialize the model pool: {e}")
        raise

    result = RunResult(events=[init_event])

    for batch in iterator:
        if batch.data.shape != first.data.shape:
            raise DimensionMismatchError(
                f"Batch {batch.index} has shape {batch.data.shape}, expected {first.data.shape}"
            )

        start = time.perf_counter()
        scores, reliabilities = score_batch(pool, batch.data, settings.inference_mode)
        inference_seconds = time.perf_counter() - start

        if observer is not None:
            observer(batch, pool, scores)

        try:
            pool, event = adapt(pool, batch.data, reliabilities, settings, batch_index=batch.index)
        except Exception as e:
            logger.error(f"Pool adaptation failed at batch {batch.index}: {e}")
            raise
        elapsed = time.perf_counter() - start
        event.timings["inference"] = inference_seconds

        result.batch_indices.append(batch.index)
        result.scores.append(scores)
        result.labels.append(batch.labels)
        result.reliability_trace.append(pool_reliability(reliabilities))
        result.pool_size_trace.append(pool.size)
        result.events.append(event)
        result.batch_seconds.append(elapsed)

        logger.debug(f"Batch {batch.index}: {event.kind} update, pool size {pool.size}, {elapsed:.4f}s")

    if result.n_scored == 0:
        raise EmptyStreamError("Stream yielded a single batch; at least two are needed")

    logger.info(
        f"Run complete: {result.n_scored} scored batches, {result.major_updates} major updates, "
        f"final pool size {result.pool_size_trace[-1]}"
    )
    return result
