"""
Benchmark harness for streamdrift.

Runs the same synthetic stream through the adaptive pool, the single
incremental-model baseline and the ablation variants over several seeds,
and sweeps alpha/gamma for sensitivity analysis.
"""
import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from modules.domain import BenchmarkRow, DriftScenario, RunResult
from modules.evaluation import stream_auc
from modules.pipeline import run_prequential
from modules.settings import EngineSettings
from modules.stream_source import generate_drift_stream

logger = logging.getLogger(__name__)


# Settings overrides per variant
VARIANTS: Dict[str, Dict[str, object]] = {
    "adaptive": {},
    "baseline": {"max_pool_size": 1},
    "single_model": {"inference_mode": "single_model"},
    "always_merge": {"merge_mode": "always"},
    "no_merge": {"merge_mode": "never"},
}
DEFAULT_VARIANTS = ("adaptive", "baseline")
ABLATION_VARIANTS = ("single_model", "always_merge", "no_merge")


def mean_step_seconds(result: RunResult) -> Dict[str, float]:
    """Mean seconds per adaptation step, over the events that recorded it."""
    totals: Dict[str, List[float]] = {}
    for event in result.events:
        for step, seconds in event.timings.items():
            totals.setdefault(step, []).append(seconds)
    return {step: float(np.mean(values)) for step, values in totals.items()}


def summarize_run(result: RunResult, variant: str, seed: int) -> BenchmarkRow:
    """Reduce one run to a report row."""
    return BenchmarkRow(
        variant=variant,
        seed=seed,
        auc=stream_auc(result),
        mean_pool_size=float(np.mean(result.pool_size_trace)),
        max_pool_size=int(np.max(result.pool_size_trace)),
        major_updates=result.major_updates,
        mean_batch_seconds=float(np.mean(result.batch_seconds)),
        step_seconds=mean_step_seconds(result),
    )


def run_variant(scenario: DriftScenario, settings: EngineSettings, variant: str, seed: int) -> BenchmarkRow:
    """Generate the seeded stream and run one variant on it."""
    if variant not in VARIANTS:
        raise ValueError(f"Unknown variant {variant!r}; choose one of {', '.join(VARIANTS)}")

    seeded_scenario = replace(scenario, seed=seed)
    variant_settings = replace(settings, seed=seed, **VARIANTS[variant])
    result = run_prequential(generate_drift_stream(seeded_scenario), variant_settings)
    row = summarize_run(result, variant, seed)
    logger.info(
        f"{variant} seed {seed}: AUC {row.auc:.4f}, mean pool {row.mean_pool_size:.2f}, "
        f"{row.major_updates} major updates"
    )
    return row


def run_benchmark(
    scenario: DriftScenario,
    settings: EngineSettings,
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
    include_ablations: bool = False,
    variants: Optional[Sequence[str]] = None,
) -> List[BenchmarkRow]:
    """
    Compare variants on identical streams over several seeds.

    For each seed the scenario is regenerated with that seed and every
    variant runs on the same batches. The engine seed follows the stream
    seed.

    Args:
        scenario: Stream definition (its own seed is replaced per run)
        settings: Base engine settings shared by all variants
        seeds: Repetition seeds
        include_ablations: Also run single_model, always_merge and no_merge
        variants: Explicit variant list (overrides the two options above)

    Returns:
        One BenchmarkRow per (variant, seed)
    """
    if variants is None:
        variants = list(DEFAULT_VARIANTS) + (list(ABLATION_VARIANTS) if include_ablations else [])

    logger.info(f"Benchmark: variants {list(variants)} over seeds {list(seeds)}")
    rows = []
    for seed in seeds:
        for variant in variants:
            try:
                rows.append(run_variant(scenario, settings, variant, seed))
            except Exception as e:
                logger.error(f"Variant {variant} failed for seed {seed}: {e}")
                raise
    return rows


def run_sensitivity(
    scenario: DriftScenario,
    settings: EngineSettings,
    alphas: Sequence[float] = (),
    gammas: Sequence[float] = (),
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
) -> List[BenchmarkRow]:
    """
    Sweep alpha and gamma one at a time around the base settings.

    Rows are labelled "alpha=<value>" or "gamma=<value>".
    """
    rows = []
    sweeps = [("alpha", value) for value in alphas] + [("gamma", value) for value in gammas]
    for name, value in sweeps:
        swept = replace(settings, **{name: value})
        for seed in seeds:
            row = run_variant(scenario, swept, "adaptive", seed)
            row.variant = f"{name}={value:g}"
            rows.append(row)
    return rows
