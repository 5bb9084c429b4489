"""
Adaptive model pool for streamdrift.

Holds the autoencoders, scores each batch with a reliability-weighted
combination of them, and restructures the pool when its reliability drops
below alpha: a new model is trained on the batch and merged with existing
models whose latent representations are gamma-similar to it.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from modules.autoencoder import (
    DenseAutoencoder,
    OptimizerState,
    init_model,
    init_optimizer,
    latent,
    reconstruction_scores,
    suggest_latent_dim,
    train_epochs,
)
from modules.domain import AdaptationEvent, ScoreStats
from modules.scoring import compute_stats, model_reliability, standardize
from modules.settings import EngineSettings

logger = logging.getLogger(__name__)


class PoolError(Exception):
    """Raised when a pool operation is called with invalid arguments."""
    pass


class ArchitectureMismatchError(Exception):
    """Raised when merging models with different layer dimensions."""
    pass


class DegenerateRepresentationError(Exception):
    """Raised when a latent representation is constant over the batch."""
    pass


@dataclass
class PooledModel:
    """An autoencoder with its optimizer, last-update score stats and batch count."""

    id: int
    ae: DenseAutoencoder
    opt: OptimizerState
    last_stats: ScoreStats
    num_batches: int = 1


@dataclass
class ModelPool:
    """
    The set of models maintained over the stream.

    latent_dim and hidden_layers fix the architecture every new model uses.
    """

    models: List[PooledModel]
    alpha: float = 0.95
    gamma: float = 0.8
    latent_dim: int = 1
    hidden_layers: int = 2
    next_id: int = 0

    @property
    def size(self) -> int:
        return len(self.models)

    @property
    def ids(self) -> List[int]:
        return [m.id for m in self.models]

    def allocate_id(self) -> int:
        model_id = self.next_id
        self.next_id += 1
        return model_id


def pool_reliability(reliabilities: Sequence[float]) -> float:
    """
    Probability that at least one model is reliable: 1 - prod(1 - r_i).

    Example:
        >>> pool_reliability([0.5, 0.5])
        0.75
    """
    values = np.asarray(reliabilities, dtype=np.float64)
    if values.size == 0:
        raise PoolError("Pool reliability of an empty pool is undefined")
    return float(1.0 - np.prod(1.0 - values))


def _member_scores(pool: ModelPool, X: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    """Raw reconstruction scores and reliabilities of every model on X."""
    if not pool.models:
        raise PoolError("Cannot score with an empty pool")

    raw_scores = []
    reliabilities = []
    for model in pool.models:
        scores = reconstruction_scores(model.ae, X)
        raw_scores.append(scores)
        reliabilities.append(model_reliability(compute_stats(scores), model.last_stats))
    return raw_scores, np.asarray(reliabilities)


def concept_driven_scores(pool: ModelPool, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reliability-weighted sum of each model's standardized scores.

    Every model scores the batch exactly once; the reliabilities are
    returned so the adaptation step can reuse them.

    Returns:
        (scores, reliabilities) with lengths b and k
    """
    raw_scores, reliabilities = _member_scores(pool, X)
    combined = np.zeros(raw_scores[0].shape[0])
    for r, scores in zip(reliabilities, raw_scores):
        combined += r * standardize(scores)
    return combined, reliabilities


def single_model_scores(pool: ModelPool, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Standardized scores of the most reliable model alone (ablation)."""
    raw_scores, reliabilities = _member_scores(pool, X)
    best = most_reliable(pool, reliabilities)
    return standardize(raw_scores[best]), reliabilities


def score_batch(pool: ModelPool, X: np.ndarray, inference_mode: str = "concept_driven") -> Tuple[np.ndarray, np.ndarray]:
    """Dispatch to the configured inference strategy."""
    if inference_mode == "concept_driven":
        return concept_driven_scores(pool, X)
    if inference_mode == "single_model":
        return single_model_scores(pool, X)
    raise PoolError(f"Unknown inference mode: {inference_mode}")


def cka_similarity(Z1: np.ndarray, Z2: np.ndarray) -> float:
    """
    Linear centered kernel alignment of two representations of one batch.

    Columns are mean-centered, then
        ||Z1^T Z2||_F^2 / (||Z1^T Z1||_F * ||Z2^T Z2||_F).
    Invariant to orthogonal transforms and isotropic scaling.

    Raises:
        PoolError: If row counts differ or there are fewer than 2 rows
        DegenerateRepresentationError: If a representation is constant
    """
    Z1 = np.asarray(Z1, dtype=np.float64)
    Z2 = np.asarray(Z2, dtype=np.float64)
    if Z1.ndim != 2 or Z2.ndim != 2:
        raise PoolError("Representations must be 2-D matrices")
    if Z1.shape[0] != Z2.shape[0]:
        raise PoolError(f"Representations cover different row counts ({Z1.shape[0]} vs {Z2.shape[0]})")
    if Z1.shape[0] < 2:
        raise PoolError("Similarity needs at least 2 rows")

    Z1 = Z1 - Z1.mean(axis=0)
    Z2 = Z2 - Z2.mean(axis=0)

    self1 = np.linalg.norm(Z1.T @ Z1)
    self2 = np.linalg.norm(Z2.T @ Z2)
    if self1 == 0.0 or self2 == 0.0:
        raise DegenerateRepresentationError("Representation is constant across the batch")

    cross = np.linalg.norm(Z1.T @ Z2) ** 2
    return float(np.clip(cross / (self1 * self2), 0.0, 1.0))


def merge_models(m1: PooledModel, m2: PooledModel, new_id: int) -> PooledModel:
    """
    Batch-count-weighted average of two models' parameters.

    theta = (N1 * theta1 + N2 * theta2) / (N1 + N2), applied as convex
    weights; two copies of one model with equal counts merge back into it
    exactly. The optimizer restarts from zero moments; last_stats come from
    the parent with more batches (m1 on ties).

    Raises:
        ArchitectureMismatchError: If layer dimensions differ
    """
    if m1.ae.layer_dims != m2.ae.layer_dims:
        raise ArchitectureMismatchError(
            f"Cannot merge models with layer dims {m1.ae.layer_dims} and {m2.ae.layer_dims}"
        )

    total = m1.num_batches + m2.num_batches
    w1 = m1.num_batches / total
    w2 = m2.num_batches / total

    merged_ae = m1.ae.copy()
    merged_ae.set_parameters([
        w1 * p1 + w2 * p2 for p1, p2 in zip(m1.ae.parameters(), m2.ae.parameters())
    ])

    opt = init_optimizer(
        merged_ae,
        learning_rate=m1.opt.learning_rate,
        minibatch_size=m1.opt.minibatch_size,
        seed=m1.opt.seed,
    )
    last_stats = m1.last_stats if m1.num_batches >= m2.num_batches else m2.last_stats

    return PooledModel(id=new_id, ae=merged_ae, opt=opt, last_stats=last_stats, num_batches=total)


def most_reliable(pool: ModelPool, reliabilities: Sequence[float]) -> int:
    """
    Index of the most reliable model; ties go to the lowest id.

    Example:
        >>> most_reliable(pool, [0.1, 0.9, 0.3])
        1
    """
    values = np.asarray(reliabilities, dtype=np.float64)
    if values.size == 0 or values.size != len(pool.models):
        raise PoolError(
            f"Need one reliability per model (got {values.size} for {len(pool.models)} models)"
        )
    best = values.max()
    candidates = [i for i, r in enumerate(values) if r == best]
    return min(candidates, key=lambda i: pool.models[i].id)


def _refresh_stats(model: PooledModel, X: np.ndarray) -> None:
    model.last_stats = compute_stats(reconstruction_scores(model.ae, X))


def create_model(pool: ModelPool, X: np.ndarray, settings: EngineSettings) -> PooledModel:
    """
    Build, train (epochs_init) and summarize a new model on X.

    Weights are seeded with seed + model id, or with the settings seed for
    every model under shared_init. The shuffle seed is always seed + id.
    """
    model_id = pool.allocate_id()
    init_seed = settings.seed if settings.shared_init else settings.seed + model_id
    ae = init_model(X.shape[1], pool.latent_dim, pool.hidden_layers, init_seed)
    opt = init_optimizer(
        ae,
        learning_rate=settings.learning_rate,
        minibatch_size=settings.minibatch_size,
        seed=settings.seed + model_id,
    )
    train_epochs(ae, opt, X, settings.epochs_init)

    model = PooledModel(id=model_id, ae=ae, opt=opt, last_stats=compute_stats([0.0]), num_batches=1)
    _refresh_stats(model, X)
    return model


def init_pool(X: np.ndarray, settings: EngineSettings, batch_index: int = 0) -> Tuple[ModelPool, AdaptationEvent]:
    """
    Create a pool holding one model built from the first batch.

    Returns:
        (pool, init event)
    """
    X = np.asarray(X, dtype=np.float64)
    latent_dim = settings.latent_dim
    if latent_dim is None:
        latent_dim = suggest_latent_dim(X, settings.explained_variance)
        logger.info(f"Latent size chosen from first batch: {latent_dim}")

    pool = ModelPool(
        models=[],
        alpha=settings.alpha,
        gamma=settings.gamma,
        latent_dim=latent_dim,
        hidden_layers=settings.hidden_layers,
    )

    start = time.perf_counter()
    model = create_model(pool, X, settings)
    pool.models.append(model)
    elapsed = time.perf_counter() - start

    logger.info(f"Pool initialized with model {model.id} (layer dims {model.ae.layer_dims})")
    event = AdaptationEvent(
        kind="init",
        batch_index=batch_index,
        model_id=model.id,
        pool_size=pool.size,
        timings={"initial_update": elapsed},
    )
    return pool, event


def compact(
    pool: ModelPool,
    new_model: PooledModel,
    X: np.ndarray,
    merge_mode: str = "similarity",
) -> Tuple[ModelPool, PooledModel, List[int]]:
    """
    Add new_model to the pool, merging it with similar existing models.

    Greedy loop: while some existing model's latent representation of X has
    similarity >= gamma with the new model's, merge the new model with the
    most similar one (removing it) and recompute the new model's
    representation. On exit every remaining model is < gamma-similar to the
    new model. A constant representation counts as similarity 0.

    merge_mode "always" merges with every model regardless of similarity;
    "never" only appends.

    Returns:
        (pool, final new model, ids of the models merged into it)
    """
    merged_ids: List[int] = []
    if merge_mode == "never":
        pool.models.append(new_model)
        return pool, new_model, merged_ids

    remaining = list(pool.models)
    latents = {m.id: latent(m.ae, X) for m in remaining}
    z_new = latent(new_model.ae, X)

    while remaining:
        similarities = []
        for model in remaining:
            try:
                similarities.append(cka_similarity(z_new, latents[model.id]))
            except DegenerateRepresentationError:
                logger.warning(f"Degenerate representation comparing with model {model.id}; treated as dissimilar")
                similarities.append(0.0)

        best = int(np.argmax(similarities))
        if merge_mode == "similarity" and similarities[best] < pool.gamma:
            break

        partner = remaining.pop(best)
        logger.debug(f"Merging new model {new_model.id} with model {partner.id} (similarity {similarities[best]:.4f})")
        new_model = merge_models(new_model, partner, pool.allocate_id())
        merged_ids.append(partner.id)
        z_new = latent(new_model.ae, X)

    pool.models = remaining + [new_model]
    return pool, new_model, merged_ids


def adapt(
    pool: ModelPool,
    X: np.ndarray,
    reliabilities: Sequence[float],
    settings: EngineSettings,
    batch_index: int = 0,
) -> Tuple[ModelPool, AdaptationEvent]:
    """
    Update the pool after the batch has been scored.

    If the pool reliability is at least alpha (or the pool is at its size
    cap), the most reliable model gets `epochs_update` more epochs on X, its
    batch count grows by one and its stats are recomputed on X after the
    update. Otherwise a new model is trained on X and the pool is compacted.

    Args:
        pool: Model pool (mutated)
        X: The batch just scored
        reliabilities: Per-model reliabilities from scoring this batch
        settings: Engine settings
        batch_index: Stream position, recorded in the event

    Returns:
        (pool, event)
    """
    X = np.asarray(X, dtype=np.float64)
    start = time.perf_counter()
    reliability = pool_reliability(reliabilities)
    timings = {"reliability": time.perf_counter() - start}

    at_capacity = settings.max_pool_size is not None and pool.size >= settings.max_pool_size

    if reliability >= pool.alpha or at_capacity:
        start = time.perf_counter()
        target = pool.models[most_reliable(pool, reliabilities)]
        train_epochs(target.ae, target.opt, X, settings.epochs_update)
        target.num_batches += 1
        _refresh_stats(target, X)
        timings["model_update"] = time.perf_counter() - start

        logger.debug(f"Batch {batch_index}: minor update of model {target.id} (R_P={reliability:.4f})")
        event = AdaptationEvent(
            kind="minor",
            batch_index=batch_index,
            model_id=target.id,
            pool_size=pool.size,
            pool_reliability=reliability,
            timings=timings,
        )
        return pool, event

    start = time.perf_counter()
    new_model = create_model(pool, X, settings)
    timings["initial_update"] = time.perf_counter() - start

    start = time.perf_counter()
    pool, new_model, merged_ids = compact(pool, new_model, X, settings.merge_mode)
    timings["merge"] = time.perf_counter() - start

    logger.info(
        f"Batch {batch_index}: major update (R_P={reliability:.4f}), model {new_model.id} "
        f"merged {merged_ids}, pool size {pool.size}"
    )
    event = AdaptationEvent(
        kind="major",
        batch_index=batch_index,
        model_id=new_model.id,
        pool_size=pool.size,
        pool_reliability=reliability,
        merged_ids=merged_ids,
        timings=timings,
    )
    return pool, event
