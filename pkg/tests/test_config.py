from __future__ import annotations

import pytest

from robostage.config import ConfigError, EngineConfig


def test_defaults():
    cfg = EngineConfig()
    assert (cfg.beta, cfg.tau, cfg.connective_but, cfg.connective_so) == (0.6, 3.0, 6.0, 2.0)
    assert (cfg.step_size, cfg.min_distance, cfg.irony_enabled) == (0.25, 0.5, False)


@pytest.mark.parametrize(
    "overrides",
    [
        {"decay_weight": 0.0},
        {"decay_weight": 1.0},
        {"step_threshold": 0.0},
        {"connective_so": 7.0},
        {"min_distance": 0.0},
        {"rng_seed": 1.5},
    ],
)
def test_invalid_values(overrides):
    with pytest.raises(ConfigError):
        EngineConfig(**overrides)


def test_json_roundtrip_and_overrides():
    cfg = EngineConfig.from_json('{"decay_weight": 0.5, "rng_seed": 9}')
    assert cfg.beta == 0.5 and cfg.rng_seed == 9
    assert EngineConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.with_overrides(decay_weight=None, step_threshold=2.0).tau == 2.0
    assert cfg.with_overrides(decay_weight=None).beta == 0.5


def test_unknown_key():
    with pytest.raises(ConfigError, match="bogus"):
        EngineConfig.from_dict({"bogus": 1})
