"""
streamdrift command-line entry point.

Subcommands:
    run       score one stream (CSV file or synthetic scenario) and write
              scores.csv, trace.csv, events.json and batch_auc.csv
    bench     compare the adaptive pool against the single-model baseline
              (and optionally the ablations) over several seeds
    sweep     alpha/gamma sensitivity sweep
    generate  write a synthetic scenario stream to CSV

Usage:
    python app.py generate --preset abrupt-recurrent --output stream.csv
    python app.py run --input stream.csv --label-column label --out-dir out
    python app.py bench --preset abrupt-recurrent --seeds 0,1,2,3,4 --out-dir bench
"""
import argparse
import logging
import sys
from dataclasses import replace
from typing import List, Optional

from modules.autoencoder import DimensionMismatchError, ModelConfigError, NumericDivergenceError
from modules.benchmark import run_benchmark, run_sensitivity
from modules.domain import DriftScenario
from modules.evaluation import EvaluationError, stream_auc
from modules.model_pool import ArchitectureMismatchError, PoolError
from modules.pipeline import EmptyStreamError, run_prequential
from modules.report import format_benchmark_table, write_benchmark_report, write_run_outputs
from modules.scenario_config import PRESETS, ScenarioConfigError, load_scenario, preset_scenario, save_scenario
from modules.scoring import ScoringError
from modules.settings import INFERENCE_MODES, MERGE_MODES, EngineSettings, SettingsError, get_settings, load_settings
from modules.stream_source import StreamFormatError, generate_drift_stream, read_csv_stream, write_csv_stream

logger = logging.getLogger(__name__)

# Errors reported as a one-line diagnostic with exit code 1
PACKAGE_ERRORS = (
    ArchitectureMismatchError,
    DimensionMismatchError,
    EmptyStreamError,
    EvaluationError,
    FileNotFoundError,
    ModelConfigError,
    NumericDivergenceError,
    PoolError,
    ScenarioConfigError,
    ScoringError,
    SettingsError,
    StreamFormatError,
)


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand that runs the engine."""
    group = parser.add_argument_group("engine")
    group.add_argument("--config", help="JSON file of engine setting overrides")
    group.add_argument("--batch-size", type=int, help="Points per batch (default: 512)")
    group.add_argument("--alpha", type=float, help="Pool reliability threshold (default: 0.95)")
    group.add_argument("--gamma", type=float, help="Merge similarity threshold (default: 0.8)")
    group.add_argument("--epochs-init", type=int, help="Epochs to train a new model (default: 5)")
    group.add_argument("--epochs-update", type=int, help="Epochs per minor update (default: 1)")
    group.add_argument("--latent-dim", type=int, help="Latent layer size (default: chosen by PCA)")
    group.add_argument("--hidden-layers", type=int, help="Encoder layer transitions (default: 2)")
    group.add_argument("--learning-rate", type=float, help="Adam learning rate (default: 1e-3)")
    group.add_argument("--seed", type=int, help="Engine seed (default: 0)")
    group.add_argument("--inference-mode", choices=INFERENCE_MODES, help="Scoring strategy (default: concept_driven)")
    group.add_argument("--merge-mode", choices=MERGE_MODES, help="Merge strategy (default: similarity)")
    group.add_argument("--max-pool-size", type=int, help="Cap on the number of pooled models")


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("synthetic stream")
    group.add_argument("--scenario", help="Scenario JSON file")
    group.add_argument("--preset", choices=PRESETS, help="Built-in scenario")
    group.add_argument("--dim", type=int, default=16, help="Dimensionality of preset streams (default: 16)")
    group.add_argument("--n-batches", type=int, help="Length of preset streams in batches")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamdrift",
        description="Adaptive model-pool anomaly detection on drifting data streams",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Diagnostics level on stderr (default: WARNING)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Score one stream")
    run_parser.add_argument("--input", help="CSV stream file")
    run_parser.add_argument("--label-column", help="Name of the 0/1 anomaly label column in --input")
    run_parser.add_argument("--out-dir", default="out", help="Output directory (default: out)")
    _add_scenario_flags(run_parser)
    _add_engine_flags(run_parser)

    bench_parser = subparsers.add_parser("bench", help="Compare the pool with the single-model baseline")
    bench_parser.add_argument("--seeds", type=_int_list, default=[0, 1, 2, 3, 4], help="Comma-separated seeds (default: 0,1,2,3,4)")
    bench_parser.add_argument("--ablations", action="store_true", help="Also run single_model, always_merge and no_merge")
    bench_parser.add_argument("--out-dir", default="bench", help="Output directory (default: bench)")
    _add_scenario_flags(bench_parser)
    _add_engine_flags(bench_parser)

    sweep_parser = subparsers.add_parser("sweep", help="alpha/gamma sensitivity sweep")
    sweep_parser.add_argument("--alphas", type=_float_list, default=[], help="Comma-separated alpha values")
    sweep_parser.add_argument("--gammas", type=_float_list, default=[], help="Comma-separated gamma values")
    sweep_parser.add_argument("--seeds", type=_int_list, default=[0, 1, 2, 3, 4], help="Comma-separated seeds (default: 0,1,2,3,4)")
    sweep_parser.add_argument("--out-dir", default="sweep", help="Output directory (default: sweep)")
    _add_scenario_flags(sweep_parser)
    _add_engine_flags(sweep_parser)

    generate_parser = subparsers.add_parser("generate", help="Write a synthetic stream to CSV")
    generate_parser.add_argument("--output", required=True, help="CSV file to write")
    generate_parser.add_argument("--save-scenario", help="Also write the scenario as JSON")
    generate_parser.add_argument("--batch-size", type=int, help="Points per batch for presets (default: 512)")
    generate_parser.add_argument("--seed", type=int, help="Stream seed (default: scenario seed or 0)")
    _add_scenario_flags(generate_parser)

    return parser


def resolve_settings(args: argparse.Namespace) -> EngineSettings:
    """Defaults, then the --config file, then explicit flags."""
    base = load_settings(args.config) if args.config else get_settings()
    return base.with_overrides(
        batch_size=args.batch_size,
        alpha=args.alpha,
        gamma=args.gamma,
        epochs_init=args.epochs_init,
        epochs_update=args.epochs_update,
        latent_dim=args.latent_dim,
        hidden_layers=args.hidden_layers,
        learning_rate=args.learning_rate,
        seed=args.seed,
        inference_mode=args.inference_mode,
        merge_mode=args.merge_mode,
        max_pool_size=args.max_pool_size,
    )


def resolve_scenario(args: argparse.Namespace, batch_size: int, seed: Optional[int]) -> DriftScenario:
    """Scenario from --scenario or --preset; the seed flag overrides the file's seed."""
    if args.scenario:
        scenario = load_scenario(args.scenario)
        if seed is not None:
            scenario = replace(scenario, seed=seed)
        return scenario
    return preset_scenario(
        args.preset,
        dim=args.dim,
        batch_size=batch_size,
        seed=seed if seed is not None else 0,
        n_batches=args.n_batches,
    )


def _require_one_source(parser: argparse.ArgumentParser, args: argparse.Namespace, allow_input: bool) -> None:
    sources = [name for name in ("input", "scenario", "preset") if getattr(args, name, None)]
    allowed = "--input, --scenario or --preset" if allow_input else "--scenario or --preset"
    if not sources:
        parser.error(f"{args.command}: one of {allowed} is required")
    if len(sources) > 1:
        parser.error(f"{args.command}: {' and '.join('--' + s for s in sources)} cannot be combined")


def cmd_run(args: argparse.Namespace) -> int:
    settings = resolve_settings(args)
    if args.input:
        stream = read_csv_stream(args.input, settings.batch_size, label_column=args.label_column)
        source = args.input
    else:
        scenario = resolve_scenario(args, settings.batch_size, args.seed)
        stream = generate_drift_stream(scenario)
        source = args.scenario or f"preset {args.preset}"

    print(f"Running streamdrift on {source}...")
    result = run_prequential(stream, settings)
    paths = write_run_outputs(result, args.out_dir)

    print(f"✓ Run complete!")
    print(f"  Scored batches: {result.n_scored}")
    print(f"  Major updates: {result.major_updates}")
    print(f"  Final pool size: {result.pool_size_trace[-1]}")
    if result.has_labels:
        try:
            print(f"  Stream AUC: {stream_auc(result):.4f}")
        except EvaluationError as e:
            print(f"  ⚠️ Stream AUC unavailable: {e}")
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    settings = resolve_settings(args)
    scenario = resolve_scenario(args, settings.batch_size, None)

    print(f"Benchmarking over seeds {args.seeds}...")
    rows = run_benchmark(scenario, settings, seeds=args.seeds, include_ablations=args.ablations)
    paths = write_benchmark_report(rows, args.out_dir)

    print(format_benchmark_table(rows))
    print(f"✓ Report written to {paths['report']}")
    print(f"✓ Step timings written to {paths['timings']}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if not args.alphas and not args.gammas:
        print("✗ Error: sweep needs --alphas and/or --gammas", file=sys.stderr)
        return 1

    settings = resolve_settings(args)
    scenario = resolve_scenario(args, settings.batch_size, None)

    print(f"Sweeping alpha={args.alphas} gamma={args.gammas} over seeds {args.seeds}...")
    rows = run_sensitivity(scenario, settings, alphas=args.alphas, gammas=args.gammas, seeds=args.seeds)
    paths = write_benchmark_report(rows, args.out_dir)

    print(format_benchmark_table(rows))
    print(f"✓ Report written to {paths['report']}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    batch_size = args.batch_size if args.batch_size is not None else get_settings().batch_size
    scenario = resolve_scenario(args, batch_size, args.seed)

    n_batches = write_csv_stream(generate_drift_stream(scenario), args.output)
    print(f"✓ Wrote {n_batches} batches of {scenario.batch_size} points (d={scenario.dim}) to {args.output}")

    if args.save_scenario:
        save_scenario(scenario, args.save_scenario)
        print(f"  Scenario: {args.save_scenario}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "bench": cmd_bench,
    "sweep": cmd_sweep,
    "generate": cmd_generate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch to a subcommand.

    Returns:
        0 on success, 1 on a reported error (argparse exits with 2 on
        usage errors)
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _require_one_source(parser, args, allow_input=args.command == "run")

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return COMMANDS[args.command](args)
    except PACKAGE_ERRORS as e:
        print(f"✗ Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
