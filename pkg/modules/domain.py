"""
Domain models for streamdrift.
Shared dataclasses used across the engine, stream sources and reports.
"""
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Any, Literal

import numpy as np


Transition = Literal["abrupt", "gradual", "incremental"]
EventKind = Literal["init", "minor", "major"]


@dataclass
class ScoreStats:
    """
    Summary of one model's anomaly scores on one batch.

    The <min, max, avg> triplet plus the batch size is all the reliability
    estimate needs.
    """

    s_min: float
    s_max: float
    avg: float
    count: int

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScoreStats":
        """Create instance from dictionary."""
        return cls(**data)


@dataclass
class Batch:
    """
    A block of b data points from the stream.

    labels (1 = anomaly) are only present when ground truth is known.
    """

    data: np.ndarray
    index: int
    labels: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])


@dataclass
class ConceptSpec:
    """
    Diagonal-Gaussian description of one concept.

    Normal points follow N(normal_mean, diag(normal_var)); anomalies follow
    N(anomaly_mean, diag(anomaly_var)).
    """

    normal_mean: List[float]
    normal_var: List[float]
    anomaly_mean: List[float]
    anomaly_var: List[float]

    def to_dict(self) -> Dict[str, List[float]]:
        """Convert to dictionary for serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, List[float]]) -> "ConceptSpec":
        """Create instance from dictionary."""
        return cls(**data)


@dataclass
class DriftSegment:
    """
    One schedule entry: run `concept` for `duration` batches.

    The transition describes how the stream moves from the previous
    segment's concept into this one.
    """

    concept: int
    duration: int
    transition: Transition = "abrupt"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DriftSegment":
        """Create instance from dictionary."""
        return cls(**data)


@dataclass
class DriftScenario:
    """
    Synthetic concept-drift stream definition.

    Recurrent drift is a schedule that revisits a concept index.
    """

    concepts: List[ConceptSpec]
    schedule: List[DriftSegment]
    dim: int
    batch_size: int
    anomaly_ratio: float = 0.01
    seed: int = 0

    @property
    def total_batches(self) -> int:
        return sum(segment.duration for segment in self.schedule)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "concepts": [concept.to_dict() for concept in self.concepts],
            "schedule": [segment.to_dict() for segment in self.schedule],
            "dim": self.dim,
            "batch_size": self.batch_size,
            "anomaly_ratio": self.anomaly_ratio,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DriftScenario":
        """Create instance from dictionary."""
        return cls(
            concepts=[ConceptSpec.from_dict(c) for c in data["concepts"]],
            schedule=[DriftSegment.from_dict(s) for s in data["schedule"]],
            dim=data["dim"],
            batch_size=data["batch_size"],
            anomaly_ratio=data.get("anomaly_ratio", 0.01),
            seed=data.get("seed", 0),
        )


@dataclass
class AdaptationEvent:
    """
    What the pool did with one batch.

    - "init": pool created from the first batch (model_id = first model)
    - "minor": model_id was incrementally trained
    - "major": model_id is the new (possibly merged) model, merged_ids the
      existing models absorbed into it

    timings holds per-step wall-clock seconds and is never written to
    deterministic output files.
    """

    kind: EventKind
    batch_index: int
    model_id: int
    pool_size: int
    pool_reliability: Optional[float] = None
    merged_ids: List[int] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        data = asdict(self)
        if not include_timings:
            data.pop("timings")
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AdaptationEvent":
        """Create instance from dictionary."""
        return cls(**data)


@dataclass
class RunResult:
    """
    Output of one prequential run.

    All per-batch lists are aligned and cover the scored batches only
    (batch 0 initializes the pool and is not scored). events additionally
    starts with the "init" event.
    """

    batch_indices: List[int] = field(default_factory=list)
    scores: List[np.ndarray] = field(default_factory=list)
    labels: List[Optional[np.ndarray]] = field(default_factory=list)
    reliability_trace: List[float] = field(default_factory=list)
    pool_size_trace: List[int] = field(default_factory=list)
    events: List[AdaptationEvent] = field(default_factory=list)
    batch_seconds: List[float] = field(default_factory=list)

    @property
    def n_scored(self) -> int:
        return len(self.batch_indices)

    @property
    def has_labels(self) -> bool:
        return self.n_scored > 0 and all(labels is not None for labels in self.labels)

    @property
    def major_updates(self) -> int:
        return sum(1 for event in self.events if event.kind == "major")


@dataclass
class BenchmarkRow:
    """
    One (variant, seed) line of a benchmark or sensitivity report.

    step_seconds maps each adaptation step (inference, reliability,
    model_update, initial_update, merge) to its mean wall-clock seconds
    over the events of the run that performed it.
    """

    variant: str
    seed: int
    auc: float
    mean_pool_size: float
    max_pool_size: int
    major_updates: int
    mean_batch_seconds: float
    step_seconds: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BenchmarkRow":
        """Create instance from dictionary."""
        return cls(**data)
