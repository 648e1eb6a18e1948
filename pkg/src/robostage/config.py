"""Run configuration shared by every stage of the pipeline."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Any

# Stage geometry: a 4 m x 3 m plane centred on the origin, actors start
# 2 m apart on the x axis facing each other.
STAGE_WIDTH = 4.0
STAGE_DEPTH = 3.0
INITIAL_SEPARATION = 2.0
REACH_MARGIN = 0.3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    decay_weight: float = 0.6
    step_threshold: float = 3.0
    connective_but: float = 6.0
    connective_so: float = 2.0
    irony_enabled: bool = False
    irony_threshold: float = 8.0
    step_size: float = 0.25
    min_distance: float = 0.5
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.decay_weight < 1.0:
            raise ConfigError(f"decay_weight must lie strictly between 0 and 1, got {self.decay_weight}")
        for name in ("step_threshold", "connective_but", "connective_so", "irony_threshold", "step_size"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not self.connective_so < self.connective_but:
            raise ConfigError("connective_so must be smaller than connective_but")
        if not 0.0 < self.min_distance < INITIAL_SEPARATION:
            raise ConfigError(f"min_distance must lie in (0, {INITIAL_SEPARATION})")
        if isinstance(self.rng_seed, bool) or not isinstance(self.rng_seed, int):
            raise ConfigError("rng_seed must be an integer")

    @property
    def beta(self) -> float:
        return self.decay_weight

    @property
    def tau(self) -> float:
        return self.step_threshold

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> EngineConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> EngineConfig:
        return cls.from_dict(json.loads(text))

    def with_overrides(self, **overrides: Any) -> EngineConfig:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
