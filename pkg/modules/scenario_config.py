"""
Drift scenario loader and validator for streamdrift.

Loads synthetic-stream scenarios from JSON, validates every field, and
builds preset scenarios of well-separated Gaussian concepts.
"""
import json
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from modules.domain import ConceptSpec, DriftScenario, DriftSegment


REQUIRED_SCENARIO_KEYS = ["concepts", "schedule", "anomaly_ratio", "dim", "batch_size", "seed"]
REQUIRED_CONCEPT_KEYS = ["normal_mean", "normal_var", "anomaly_mean", "anomaly_var"]
REQUIRED_SEGMENT_KEYS = ["concept", "duration", "transition"]
TRANSITIONS = ("abrupt", "gradual", "incremental")
PRESETS = ("stationary", "abrupt", "abrupt-recurrent", "gradual", "incremental")


class ScenarioConfigError(Exception):
    """Raised when a drift scenario is invalid or a scenario file is malformed."""
    pass


def _check_keys(data: Dict[str, Any], required: List[str], where: str) -> None:
    if not isinstance(data, dict):
        raise ScenarioConfigError(f"{where} must be a JSON object")
    missing = [key for key in required if key not in data]
    if missing:
        raise ScenarioConfigError(f"Missing required keys in {where}: {', '.join(missing)}")
    unknown = sorted(set(data) - set(required))
    if unknown:
        raise ScenarioConfigError(f"Unknown keys in {where}: {', '.join(unknown)}")


def _is_int(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def validate_scenario(scenario: DriftScenario) -> None:
    """
    Check a scenario's invariants.

    - dim >= 2, batch_size >= 1, 0 < anomaly_ratio < 0.5
    - every concept vector has length dim, variances > 0
    - schedule non-empty, durations >= 1, concept indices valid,
      transitions in {abrupt, gradual, incremental}

    Raises:
        ScenarioConfigError: On the first violated invariant
    """
    for name in ("dim", "batch_size", "seed"):
        if not _is_int(getattr(scenario, name)):
            raise ScenarioConfigError(f"{name} must be an integer (got {getattr(scenario, name)!r})")
    if scenario.dim < 2:
        raise ScenarioConfigError(f"dim must be at least 2 (got {scenario.dim})")
    if scenario.batch_size < 1:
        raise ScenarioConfigError(f"batch_size must be positive (got {scenario.batch_size})")
    if not 0.0 < scenario.anomaly_ratio < 0.5:
        raise ScenarioConfigError(f"anomaly_ratio must be in (0, 0.5) (got {scenario.anomaly_ratio})")
    if scenario.seed < 0:
        raise ScenarioConfigError(f"seed must be non-negative (got {scenario.seed})")
    if not scenario.concepts:
        raise ScenarioConfigError("Scenario needs at least one concept")

    for i, concept in enumerate(scenario.concepts):
        for name in REQUIRED_CONCEPT_KEYS:
            try:
                values = np.asarray(getattr(concept, name), dtype=np.float64)
            except (TypeError, ValueError):
                raise ScenarioConfigError(f"Concept {i} field '{name}' must be a list of numbers")
            if values.shape != (scenario.dim,):
                raise ScenarioConfigError(
                    f"Concept {i} field '{name}' must have length {scenario.dim} (got shape {values.shape})"
                )
            if not np.all(np.isfinite(values)):
                raise ScenarioConfigError(f"Concept {i} field '{name}' contains non-finite values")
            if name.endswith("_var") and np.any(values <= 0):
                raise ScenarioConfigError(f"Concept {i} field '{name}' must be strictly positive")

    if not scenario.schedule:
        raise ScenarioConfigError("Scenario schedule is empty")
    for i, segment in enumerate(scenario.schedule):
        if not _is_int(segment.concept) or not _is_int(segment.duration):
            raise ScenarioConfigError(f"Segment {i} concept and duration must be integers")
        if not 0 <= segment.concept < len(scenario.concepts):
            raise ScenarioConfigError(f"Segment {i} refers to unknown concept {segment.concept}")
        if segment.duration < 1:
            raise ScenarioConfigError(f"Segment {i} duration must be at least 1 (got {segment.duration})")
        if segment.transition not in TRANSITIONS:
            raise ScenarioConfigError(
                f"Segment {i} transition must be one of {', '.join(TRANSITIONS)} (got {segment.transition!r})"
            )


def scenario_from_dict(data: Dict[str, Any]) -> DriftScenario:
    """Build and validate a scenario from parsed JSON, rejecting unknown keys."""
    _check_keys(data, REQUIRED_SCENARIO_KEYS, "scenario")
    if not isinstance(data["concepts"], list) or not isinstance(data["schedule"], list):
        raise ScenarioConfigError("'concepts' and 'schedule' must be lists")
    for i, concept in enumerate(data["concepts"]):
        _check_keys(concept, REQUIRED_CONCEPT_KEYS, f"concept {i}")
    for i, segment in enumerate(data["schedule"]):
        _check_keys(segment, REQUIRED_SEGMENT_KEYS, f"schedule segment {i}")

    try:
        scenario = DriftScenario.from_dict(data)
    except (TypeError, ValueError) as e:
        raise ScenarioConfigError(f"Invalid scenario values: {e}")

    validate_scenario(scenario)
    return scenario


def load_scenario(path: str) -> DriftScenario:
    """
    Load and validate a drift scenario from a JSON file.

    Args:
        path: Path to the scenario file

    Returns:
        Validated DriftScenario

    Raises:
        FileNotFoundError: If the file doesn't exist
        ScenarioConfigError: If the JSON is invalid or a field is missing,
            unknown or out of range
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"Scenario file not found: {path}")
    except json.JSONDecodeError as e:
        raise ScenarioConfigError(f"Invalid JSON in scenario file: {e}")

    return scenario_from_dict(data)


def save_scenario(scenario: DriftScenario, path: str) -> None:
    """Write a scenario as indented JSON."""
    validate_scenario(scenario)
    with open(path, "w") as f:
        json.dump(scenario.to_dict(), f, indent=2)


def build_separated_scenario(
    n_concepts: int,
    dim: int,
    batch_size: int,
    schedule: Sequence[Tuple[int, int, str]],
    separation: float = 6.0,
    noise_std: float = 0.1,
    anomaly_ratio: float = 0.01,
    seed: int = 0,
) -> DriftScenario:
    """
    Scenario of well-separated diagonal-Gaussian concepts.

    Concept c has every feature's mean at (c - (n - 1) / 2) * separation *
    noise_std, so neighbouring concepts sit `separation` standard deviations
    apart on every feature. Each concept concentrates its variance on its
    own block of features (std noise_std there, noise_std / 4 elsewhere),
    giving each concept a distinct low-dimensional structure. Anomalies are
    drawn mid-way between the concept and the next one (cyclically); a
    single concept puts them half a separation above its mean.

    Args:
        schedule: (concept, duration, transition) triples
    """
    if n_concepts < 1:
        raise ScenarioConfigError(f"n_concepts must be positive (got {n_concepts})")
    if dim < 2:
        raise ScenarioConfigError(f"dim must be at least 2 (got {dim})")

    spacing = separation * noise_std
    block = max(2, dim // max(n_concepts, 1))
    means = [np.full(dim, (c - (n_concepts - 1) / 2.0) * spacing) for c in range(n_concepts)]

    concepts = []
    for c in range(n_concepts):
        std = np.full(dim, noise_std / 4.0)
        active = [(c * block + j) % dim for j in range(block)]
        std[active] = noise_std

        if n_concepts == 1:
            anomaly_mean = means[c] + spacing / 2.0
        else:
            anomaly_mean = (means[c] + means[(c + 1) % n_concepts]) / 2.0

        concepts.append(ConceptSpec(
            normal_mean=means[c].tolist(),
            normal_var=(std ** 2).tolist(),
            anomaly_mean=anomaly_mean.tolist(),
            anomaly_var=np.full(dim, noise_std ** 2).tolist(),
        ))

    scenario = DriftScenario(
        concepts=concepts,
        schedule=[DriftSegment(concept=c, duration=d, transition=t) for c, d, t in schedule],
        dim=dim,
        batch_size=batch_size,
        anomaly_ratio=anomaly_ratio,
        seed=seed,
    )
    validate_scenario(scenario)
    return scenario


def preset_scenario(name: str, dim: int = 16, batch_size: int = 512, seed: int = 0,
                    n_batches: Optional[int] = None) -> DriftScenario:
    """
    Named preset scenarios.

    - stationary: one concept
    - abrupt: two concepts, one abrupt switch half-way
    - abrupt-recurrent: three concepts cycled abruptly in blocks of 5 batches
    - gradual: two concepts alternating with gradual transitions
    - incremental: two concepts alternating with incremental transitions

    n_batches sets the stream length (defaults: 20, 40, 60, 40, 40).
    """
    if name == "stationary":
        total = n_batches or 20
        return build_separated_scenario(1, dim, batch_size, [(0, total, "abrupt")], seed=seed)

    if name == "abrupt":
        total = n_batches or 40
        half = max(1, total // 2)
        schedule = [(0, half, "abrupt"), (1, max(1, total - half), "abrupt")]
        return build_separated_scenario(2, dim, batch_size, schedule, seed=seed)

    if name == "abrupt-recurrent":
        total = n_batches or 60
        block = 5
        schedule = [(i % 3, min(block, total - start), "abrupt") for i, start in enumerate(range(0, total, block))]
        return build_separated_scenario(3, dim, batch_size, schedule, seed=seed)

    if name in ("gradual", "incremental"):
        total = n_batches or 40
        block = max(1, total // 4)
        schedule = [(0, block, "abrupt")]
        for i, start in enumerate(range(block, total, block)):
            schedule.append(((i + 1) % 2, min(block, total - start), name))
        return build_separated_scenario(2, dim, batch_size, schedule, seed=seed)

    raise ScenarioConfigError(f"Unknown preset {name!r}; choose one of {', '.join(PRESETS)}")
