import json
from pathlib import Path

import pytest
import yaml

from src.core.config.config import (
    ConfigError,
    ConfigNotFoundError,
    EvalConfig,
    TrainConfig,
    apply_overrides,
)
from src.core.models.scenario import GoalMode
from src.core.qnet.params import Variant


@pytest.fixture
def train_yaml(tmp_path: Path) -> Path:
    """Create a temporary training config"""
    data = {
        "format": "divis-train/1",
        "variant": "reactive",
        "batches": 3,
        "episodes_per_batch": 2,
        "rollout": {"max_steps": 10},
        "sim": {"actions": {"k": 5}},
    }
    path = tmp_path / "train.yaml"
    with open(path, "w") as f:
        yaml.safe_dump(data, f)
    return path


def test_train_config_load(train_yaml: Path) -> None:
    """Test loading a training config from YAML"""
    config = TrainConfig.load(train_yaml)

    assert config.variant == Variant.REACTIVE
    assert config.batches == 3
    assert config.rollout.max_steps == 10
    assert config.rollout.gamma == 0.95
    assert config.sim.actions.k == 5


def test_load_nonexistent() -> None:
    with pytest.raises(ConfigNotFoundError, match="config not found"):
        TrainConfig.load(Path("/nonexistent/train.yaml"))


def test_load_applies_overrides(train_yaml: Path) -> None:
    config = TrainConfig.load(train_yaml, ["batches=7", "rollout.gamma=0.5", "seed=12"])

    assert config.batches == 7
    assert config.rollout.gamma == 0.5
    assert config.rollout.max_steps == 10
    assert config.seed == 12


def test_wrong_format_is_rejected(tmp_path: Path) -> None:
    path = tmp_path / "eval.json"
    path.write_text(json.dumps({"format": "divis-train/1"}))

    with pytest.raises(ConfigError, match="divis-eval/1"):
        EvalConfig.load(path)


def test_invalid_values_are_rejected(tmp_path: Path) -> None:
    path = tmp_path / "train.json"
    path.write_text(json.dumps({"rollout": {"gamma": 1.5}}))

    with pytest.raises(ConfigError):
        TrainConfig.load(path)


@pytest.mark.parametrize("suffix", [".yaml", ".json"])
def test_save_and_load(tmp_path: Path, suffix: str) -> None:
    config = EvalConfig.from_overrides(["goal_mode=category", "trials_per_scenario=3"])
    path = tmp_path / "nested" / f"eval{suffix}"

    config.save(path)

    assert EvalConfig.load(path) == config
    assert EvalConfig.load(path).goal_mode == GoalMode.CATEGORY


def test_apply_overrides_parses_values() -> None:
    data = apply_overrides({}, ["a.b=3", "a.c=true", "d=[1, 2]", "e=text"])

    assert data == {"a": {"b": 3, "c": True}, "d": [1, 2], "e": "text"}


def test_malformed_override() -> None:
    with pytest.raises(ValueError):
        apply_overrides({}, ["no-equals-sign"])


def test_epsilon_schedule() -> None:
    config = TrainConfig(epsilon_start=1.0, epsilon_end=0.2, epsilon_anneal_batches=4)

    assert config.epsilon(0) == 1.0
    assert config.epsilon(2) == pytest.approx(0.6)
    assert config.epsilon(4) == pytest.approx(0.2)
    assert config.epsilon(100) == pytest.approx(0.2)


def test_epsilon_must_decrease() -> None:
    with pytest.raises(ValueError):
        TrainConfig(epsilon_start=0.1, epsilon_end=0.5)
