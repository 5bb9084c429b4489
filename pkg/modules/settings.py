"""
Settings and configuration for streamdrift.
Engine hyperparameters with validated defaults and JSON overrides.
"""
import json
from dataclasses import dataclass, asdict, fields, replace
from typing import Any, Dict, Optional


INFERENCE_MODES = ("concept_driven", "single_model")
MERGE_MODES = ("similarity", "always", "never")


class SettingsError(Exception):
    """Raised when engine settings are invalid or a settings file is malformed."""
    pass


@dataclass(frozen=True)
class EngineSettings:
    """
    Engine settings for one prequential run.

    Defaults:
    - batch_size 512, mini-batch 32
    - alpha 0.95 (pool reliability threshold), gamma 0.8 (merge similarity)
    - 5 epochs to initialize a model, 1 epoch per incremental update
    - learning_rate 1e-3 (tune per stream)
    - latent_dim None: chosen from the first batch as the number of principal
      components explaining `explained_variance` of its variance
    - shared_init False: model k starts from seed + k. With shared_init
      every model starts from the weights seeded by `seed`; briefly trained
      models then keep nearly identical latents across concepts and the
      similarity merge folds every new model back into the pool

    Ablations:
    - inference_mode "single_model" scores with the most reliable model only
    - merge_mode "always" / "never" replace the similarity-based merge
    - max_pool_size caps the pool; once reached, drift triggers a minor
      update instead of a new model (max_pool_size=1 is the single
      incremental-model baseline)
    """

    batch_size: int = 512
    alpha: float = 0.95
    gamma: float = 0.8
    epochs_init: int = 5
    epochs_update: int = 1
    minibatch_size: int = 32
    learning_rate: float = 1e-3
    latent_dim: Optional[int] = None
    hidden_layers: int = 2
    explained_variance: float = 0.7
    seed: int = 0
    shared_init: bool = False
    inference_mode: str = "concept_driven"
    merge_mode: str = "similarity"
    max_pool_size: Optional[int] = None

    def __post_init__(self):
        """Validate ranges and mode names."""
        for name in ("batch_size", "epochs_init", "epochs_update", "minibatch_size", "hidden_layers"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise SettingsError(f"{name} must be a positive integer (got {value!r})")

        for name in ("alpha", "gamma"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise SettingsError(f"{name} must be in (0, 1) (got {value!r})")

        if self.learning_rate <= 0:
            raise SettingsError(f"learning_rate must be positive (got {self.learning_rate!r})")

        if not 0.0 < self.explained_variance <= 1.0:
            raise SettingsError(f"explained_variance must be in (0, 1] (got {self.explained_variance!r})")

        if self.latent_dim is not None and self.latent_dim < 1:
            raise SettingsError(f"latent_dim must be positive (got {self.latent_dim!r})")

        if self.max_pool_size is not None and self.max_pool_size < 1:
            raise SettingsError(f"max_pool_size must be positive (got {self.max_pool_size!r})")

        if self.seed < 0:
            raise SettingsError(f"seed must be non-negative (got {self.seed!r})")

        if self.inference_mode not in INFERENCE_MODES:
            raise SettingsError(
                f"inference_mode must be one of {', '.join(INFERENCE_MODES)} (got {self.inference_mode!r})"
            )

        if self.merge_mode not in MERGE_MODES:
            raise SettingsError(
                f"merge_mode must be one of {', '.join(MERGE_MODES)} (got {self.merge_mode!r})"
            )

    def with_overrides(self, **overrides: Any) -> "EngineSettings":
        """Copy with some fields replaced (None values are ignored)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EngineSettings":
        """Create instance from dictionary, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise SettingsError(f"Unknown settings keys: {', '.join(unknown)}")
        return cls(**data)


def load_settings(path: str) -> EngineSettings:
    """
    Load engine settings from a JSON file of overrides.

    Keys not present keep their defaults.

    Raises:
        FileNotFoundError: If the file doesn't exist
        SettingsError: If the JSON is invalid or contains unknown keys
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"Settings file not found: {path}")
    except json.JSONDecodeError as e:
        raise SettingsError(f"Invalid JSON in settings file: {e}")

    if not isinstance(data, dict):
        raise SettingsError("Settings file must contain a JSON object")

    return EngineSettings.from_dict(data)


# Global cache for the default settings instance
_settings_cache: Optional[EngineSettings] = None


def get_settings() -> EngineSettings:
    """
    Get default engine settings (cached).

    Returns the same EngineSettings instance on subsequent calls.
    """
    global _settings_cache

    if _settings_cache is None:
        _settings_cache = EngineSettings()

    return _settings_cache
