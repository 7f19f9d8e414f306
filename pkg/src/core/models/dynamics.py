from enum import StrEnum, auto
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.constants import (
    DEFAULT_AGENT_RADIUS,
    DEFAULT_CLEARANCE_THRESHOLD,
    DEFAULT_NUM_ACTIONS,
    DEFAULT_ROTATION_RANGE,
    DEFAULT_SUCCESS_DISTANCE,
    DEFAULT_VELOCITY,
)
from src.core.models.geometry import Pose


class ActionSpace(BaseModel):
    """K actions: k-1 rotation bins ordered left to right, then STOP."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(default=DEFAULT_NUM_ACTIONS, ge=1)
    rotation_range: float = Field(default=DEFAULT_ROTATION_RANGE, ge=0.0)
    velocity: float = Field(default=DEFAULT_VELOCITY, gt=0.0)

    @property
    def num_bins(self) -> int:
        return self.k - 1

    @property
    def stop(self) -> int:
        return self.k - 1

    @property
    def bin_width(self) -> float:
        return self.rotation_range / self.num_bins if self.num_bins else 0.0

    @property
    def center_bin(self) -> int:
        return self.num_bins // 2

    def angle(self, action: int) -> float:
        """Rotation of bin ``action``; positive turns left."""
        return ((self.k - 2) / 2 - action) * self.bin_width

    @property
    def angles(self) -> list[float]:
        return [self.angle(i) for i in range(self.num_bins)]

    def nearest_bin(self, bearing: float) -> int:
        """Bin whose angle is closest to ``bearing``; ties go to the lower index."""
        best, best_gap = 0, float("inf")
        for index, angle in enumerate(self.angles):
            gap = abs(angle - bearing)
            if gap < best_gap:
                best, best_gap = index, gap
        return best


class RewardParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    agent_radius: float = Field(default=DEFAULT_AGENT_RADIUS, gt=0.0)
    clearance_threshold: float = DEFAULT_CLEARANCE_THRESHOLD
    success_distance: float = Field(default=DEFAULT_SUCCESS_DISTANCE, gt=0.0)

    @model_validator(mode="after")
    def _radius_below_threshold(self) -> Self:
        if not 0.0 < self.agent_radius < self.clearance_threshold:
            raise ValueError("expected 0 < agent_radius < clearance_threshold")
        return self


class Terminal(StrEnum):
    NONE = auto()
    COLLISION = auto()
    STOPPED = auto()
    MAX_STEPS = auto()
    REACHED = auto()


class StepOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    new_pose: Pose
    reward: float
    reward_parts: tuple[float, float]
    d_o: float
    d_t: float
    terminal: Terminal = Terminal.NONE
    success: bool = False

    @property
    def collision_reward(self) -> float:
        return self.reward_parts[0]

    @property
    def progress_reward(self) -> float:
        return self.reward_parts[1]
