from enum import StrEnum, auto
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.constants import SCENARIO_FORMAT
from src.core.models.geometry import Pose


class GoalMode(StrEnum):
    GOAL_IMAGE = auto()
    CATEGORY = auto()


class Split(StrEnum):
    SEEN = auto()
    UNSEEN = auto()


class GoalSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: GoalMode
    instance_id: str | None = None
    category: str | None = None

    @model_validator(mode="after")
    def _one_active_field(self) -> Self:
        if self.mode == GoalMode.GOAL_IMAGE:
            if self.instance_id is None or self.category is not None:
                raise ValueError("goal_image mode needs instance_id and no category")
        elif self.category is None or self.instance_id is not None:
            raise ValueError("category mode needs category and no instance_id")
        return self

    @classmethod
    def for_instance(cls, instance_id: str) -> "GoalSpec":
        return cls(mode=GoalMode.GOAL_IMAGE, instance_id=instance_id)

    @classmethod
    def for_category(cls, category: str) -> "GoalSpec":
        return cls(mode=GoalMode.CATEGORY, category=category)


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    format: Literal["divis-scn/1"] = SCENARIO_FORMAT
    env_id: str
    start_pose: Pose
    goal: GoalSpec
    seed: int = Field(ge=0, lt=1 << 64)
    split: Split = Split.SEEN

    @property
    def id(self) -> str:
        return f"{self.env_id}:{self.seed}"
