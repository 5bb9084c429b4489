"""
Output files for streamdrift runs and benchmarks.

scores.csv / trace.csv / events.json / batch_auc.csv for a run,
report.csv, timings.csv and a printable table for benchmarks. Run outputs
never include wall-clock timings, so identical inputs give byte-identical
files; only benchmark reports carry them.
"""
import json
import os
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from modules.domain import BenchmarkRow, RunResult
from modules.evaluation import per_batch_auc

FLOAT_FORMAT = "%.17g"
BENCHMARK_COLUMNS = ["variant", "seed", "auc", "mean_pool_size", "max_pool_size", "major_updates", "mean_batch_seconds"]
TIMING_STEPS = ["inference", "reliability", "model_update", "initial_update", "merge"]


def scores_frame(result: RunResult) -> pd.DataFrame:
    """One row per scored data point; label column only with ground truth."""
    frame = pd.DataFrame({
        "batch_index": np.concatenate([np.full(s.size, i, dtype=np.int64) for i, s in zip(result.batch_indices, result.scores)]),
        "point_index": np.concatenate([np.arange(s.size, dtype=np.int64) for s in result.scores]),
        "score": np.concatenate(result.scores),
    })
    if result.has_labels:
        frame["label"] = np.concatenate(result.labels).astype(np.int64)
    return frame


def trace_frame(result: RunResult) -> pd.DataFrame:
    """
    One row per batch including the initializing batch.

    The init row has an empty pool_reliability (no scoring happens there).
    """
    rows = []
    for event in result.events:
        rows.append({
            "batch_index": event.batch_index,
            "pool_reliability": event.pool_reliability,
            "pool_size": event.pool_size,
            "event": event.kind,
        })
    frame = pd.DataFrame(rows, columns=["batch_index", "pool_reliability", "pool_size", "event"])
    return frame.astype({"pool_reliability": np.float64})


def write_run_outputs(result: RunResult, out_dir: str) -> Dict[str, str]:
    """
    Write the files of one run into out_dir (created if needed).

    Returns:
        Mapping of output name to file path
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "scores": os.path.join(out_dir, "scores.csv"),
        "trace": os.path.join(out_dir, "trace.csv"),
        "events": os.path.join(out_dir, "events.json"),
    }

    scores_frame(result).to_csv(paths["scores"], index=False, float_format=FLOAT_FORMAT)
    trace_frame(result).to_csv(paths["trace"], index=False, float_format=FLOAT_FORMAT)
    with open(paths["events"], "w") as f:
        json.dump([event.to_dict() for event in result.events], f, indent=2)

    if result.has_labels:
        paths["batch_auc"] = os.path.join(out_dir, "batch_auc.csv")
        frame = pd.DataFrame(per_batch_auc(result), columns=["batch_index", "auc"]).astype({"auc": np.float64})
        frame.to_csv(paths["batch_auc"], index=False, float_format=FLOAT_FORMAT)

    return paths


def benchmark_frame(rows: Sequence[BenchmarkRow]) -> pd.DataFrame:
    return pd.DataFrame([row.to_dict() for row in rows], columns=BENCHMARK_COLUMNS)


def summarize_rows(rows: Sequence[BenchmarkRow]) -> pd.DataFrame:
    """
    Mean and standard error per variant across seeds.

    Standard error uses the sample standard deviation; a single seed has
    standard error 0.
    """
    frame = benchmark_frame(rows)
    metrics = ["auc", "mean_pool_size", "max_pool_size", "major_updates", "mean_batch_seconds"]
    grouped = frame.groupby("variant", sort=False)[metrics]
    means = grouped.mean()
    counts = grouped.count()
    errors = (grouped.std(ddof=1) / np.sqrt(counts)).fillna(0.0)

    summary = pd.DataFrame(index=means.index)
    summary["seeds"] = counts["auc"]
    for metric in metrics:
        summary[f"{metric}_mean"] = means[metric]
        summary[f"{metric}_se"] = errors[metric]
    return summary.reset_index()


def timing_frame(rows: Sequence[BenchmarkRow]) -> pd.DataFrame:
    """
    Processing-time breakdown: mean seconds per step and variant across seeds.

    A step a variant never performed (no major update, say) is left empty.
    """
    records = [{"variant": row.variant, **row.step_seconds} for row in rows]
    frame = pd.DataFrame(records, columns=["variant"] + TIMING_STEPS)
    frame = frame.astype({step: np.float64 for step in TIMING_STEPS})
    return frame.groupby("variant", sort=False)[TIMING_STEPS].mean().reset_index()


def format_benchmark_table(rows: Sequence[BenchmarkRow]) -> str:
    """Human-readable summary table (mean ± standard error)."""
    summary = summarize_rows(rows)
    lines: List[str] = []
    header = f"{'Variant':<20} {'Seeds':>5} {'AUC':>17} {'Mean pool':>15} {'Max pool':>9} {'Major':>8} {'Batch s':>17}"
    lines.append(header)
    lines.append("-" * len(header))
    for _, row in summary.iterrows():
        lines.append(
            f"{row['variant']:<20} {int(row['seeds']):>5} "
            f"{row['auc_mean']:>8.4f} ± {row['auc_se']:<6.4f} "
            f"{row['mean_pool_size_mean']:>7.2f} ± {row['mean_pool_size_se']:<5.2f} "
            f"{row['max_pool_size_mean']:>9.1f} "
            f"{row['major_updates_mean']:>8.1f} "
            f"{row['mean_batch_seconds_mean']:>8.4f} ± {row['mean_batch_seconds_se']:<6.4f}"
        )
    return "\n".join(lines)


def write_benchmark_report(rows: Sequence[BenchmarkRow], out_dir: str) -> Dict[str, str]:
    """Write report.csv (per variant and seed), timings.csv (step breakdown) and report.txt."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "report": os.path.join(out_dir, "report.csv"),
        "timings": os.path.join(out_dir, "timings.csv"),
        "table": os.path.join(out_dir, "report.txt"),
    }
    benchmark_frame(rows).to_csv(paths["report"], index=False, float_format=FLOAT_FORMAT)
    timing_frame(rows).to_csv(paths["timings"], index=False, float_format=FLOAT_FORMAT)
    with open(paths["table"], "w") as f:
        f.write(format_benchmark_table(rows) + "\n")
    return paths
