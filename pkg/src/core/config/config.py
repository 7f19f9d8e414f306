import json
from pathlib import Path
from typing import Any, ClassVar, Literal, Self

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.constants import (
    DEFAULT_GAMMA,
    DEFAULT_MAX_STEPS,
    EVAL_CONFIG_FORMAT,
    TRAIN_CONFIG_FORMAT,
)
from src.core.models.dynamics import ActionSpace, RewardParams
from src.core.models.perception import EgoGrid, PerceptionParams
from src.core.models.scenario import GoalMode
from src.core.qnet.params import Variant
from src.core.worldgen.randomization import DEFAULT_BASE_PERCEPTION, RandomizationRanges


class ConfigNotFoundError(Exception):
    def __init__(self, path: str | Path):
        super().__init__(f"config not found: {path}")


class ConfigError(Exception):
    def __init__(self, path: str | Path, reason: str):
        super().__init__(f"Invalid config '{path}': {reason}")


class SimConfig(BaseModel):
    """Everything that shapes a single environment step and observation."""

    model_config = ConfigDict(frozen=True)

    grid: EgoGrid = EgoGrid()
    actions: ActionSpace = ActionSpace()
    rewards: RewardParams = RewardParams()


class RolloutConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(default=DEFAULT_GAMMA, ge=0.0, le=1.0)
    max_steps: int = Field(default=DEFAULT_MAX_STEPS, ge=1)
    branch_all_states: bool = True
    exploration_epsilon: float = Field(default=0.0, ge=0.0, le=1.0)
    # A goal-reaching episode keeps its final reward for the rest of the horizon.
    hold_goal: bool = True


def apply_overrides(data: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply ``dotted.key=value`` overrides; values are parsed as YAML scalars."""
    for override in overrides:
        key, sep, raw = override.partition("=")
        if not sep or not key:
            raise ValueError(f"override '{override}' is not of the form key=value")
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = {}
                node[part] = child
            node = child
        node[parts[-1]] = yaml.safe_load(raw)
    return data


class BaseConfig(BaseModel):
    """A versioned configuration document stored as YAML or JSON."""

    FORMAT: ClassVar[str]

    @classmethod
    def _read(cls, path: Path) -> dict[str, Any]:
        if not path.exists():
            raise ConfigNotFoundError(path)
        with open(path, "r") as f:
            # JSON is a subset of YAML, one loader covers both.
            data = yaml.safe_load(f)
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(path, "top level must be a mapping")
        return data

    @classmethod
    def load(cls, path: str | Path, overrides: list[str] | None = None) -> Self:
        path = Path(path)
        data = cls._read(path)
        try:
            data = apply_overrides(data, overrides or [])
        except ValueError as e:
            raise ConfigError(path, str(e)) from e
        found = data.setdefault("format", cls.FORMAT)
        if found != cls.FORMAT:
            raise ConfigError(path, f"expected format '{cls.FORMAT}', found '{found}'")
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(path, str(e)) from e

    @classmethod
    def from_overrides(cls, overrides: list[str] | None = None) -> Self:
        """Defaults with ``overrides`` applied, for runs without a config file."""
        data = apply_overrides({}, overrides or [])
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError("<defaults>", str(e)) from e

    def save(self, path: str | Path) -> None:
        if isinstance(path, str):
            path = Path(path)

        # Create parent directory if it doesn't exist
        path.parent.mkdir(parents=True, exist_ok=True)

        data = self.model_dump(mode="json")
        with open(path, "w") as f:
            if path.suffix in (".yaml", ".yml"):
                yaml.safe_dump(data, f, sort_keys=False)
            else:
                json.dump(data, f, indent=2)


class TrainConfig(BaseConfig):
    FORMAT: ClassVar[str] = TRAIN_CONFIG_FORMAT

    format: Literal["divis-train/1"] = TRAIN_CONFIG_FORMAT
    variant: Variant = Variant.RECURRENT_FLOW
    batches: int = Field(default=200, ge=1)
    episodes_per_batch: int = Field(default=8, ge=1)
    epochs_per_fit: int = Field(default=4, ge=0)
    # Episodes per gradient step; 0 fits the whole buffer as one batch.
    minibatch_episodes: int = Field(default=16, ge=0)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    epsilon_start: float = Field(default=1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(default=0.1, ge=0.0, le=1.0)
    epsilon_anneal_batches: int = Field(default=100, ge=1)
    buffer_capacity: int = Field(default=50_000, ge=1)
    # Greedy episodes re-run after each fit; their success rate goes into the checkpoint.
    validation_episodes: int = Field(default=8, ge=1)
    seed: int = Field(default=0, ge=0, lt=1 << 64)
    # None trains on every seen environment.
    environments: list[str] | None = None
    goal_mode: GoalMode = GoalMode.GOAL_IMAGE
    sim: SimConfig = SimConfig()
    rollout: RolloutConfig = RolloutConfig()
    base_perception: PerceptionParams = DEFAULT_BASE_PERCEPTION
    randomization: RandomizationRanges = RandomizationRanges()

    @model_validator(mode="after")
    def _epsilon_decreases(self) -> Self:
        if self.epsilon_start < self.epsilon_end:
            raise ValueError("epsilon_start must be at least epsilon_end")
        return self

    def epsilon(self, batch: int) -> float:
        """Linearly annealed exploration rate for ``batch``."""
        frac = min(batch / self.epsilon_anneal_batches, 1.0)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)


class EvalConfig(BaseConfig):
    FORMAT: ClassVar[str] = EVAL_CONFIG_FORMAT

    format: Literal["divis-eval/1"] = EVAL_CONFIG_FORMAT
    trials_per_scenario: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0, lt=1 << 64)
    seen_size: int = Field(default=120, ge=1)
    unseen_size: int = Field(default=80, ge=1)
    occlusion_heavy_size: int = Field(default=40, ge=1)
    fixture_suite_size: int = Field(default=20, ge=1)
    goal_mode: GoalMode = GoalMode.GOAL_IMAGE
    sim: SimConfig = SimConfig()
    rollout: RolloutConfig = RolloutConfig()
    base_perception: PerceptionParams = DEFAULT_BASE_PERCEPTION
    randomization: RandomizationRanges = RandomizationRanges()
