import math
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

Point = tuple[float, float]


class Pose(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    heading: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=np.float64)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.heading]

    @classmethod
    def from_list(cls, values: list[float] | tuple[float, ...]) -> "Pose":
        x, y, heading = values
        return cls(x=x, y=y, heading=heading)


def wrap_angle(angle: float) -> float:
    """Wrap into [-pi, pi]; angles already in range are returned untouched."""
    while angle > math.pi:
        angle -= 2.0 * math.pi
    while angle < -math.pi:
        angle += 2.0 * math.pi
    return angle


class Bounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains_strictly(self, x: float, y: float) -> bool:
        return self.xmin < x < self.xmax and self.ymin < y < self.ymax

    def edges(self) -> list["Segment"]:
        corners = [
            (self.xmin, self.ymin),
            (self.xmax, self.ymin),
            (self.xmax, self.ymax),
            (self.xmin, self.ymax),
        ]
        return [
            Segment(start=corners[i], end=corners[(i + 1) % 4]) for i in range(4)
        ]


class Segment(BaseModel):
    model_config = ConfigDict(frozen=True)

    start: Point
    end: Point


class PolygonObstacle(BaseModel):
    """Convex polygon; vertex order is normalized when the environment is built."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["polygon"] = "polygon"
    vertices: list[Point]
    category: str = "furniture"


class CircleObstacle(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["circle"] = "circle"
    center: Point
    radius: float = Field(gt=0)
    category: str = "furniture"


Obstacle = Annotated[PolygonObstacle | CircleObstacle, Field(discriminator="kind")]


class GoalObject(BaseModel):
    model_config = ConfigDict(frozen=True)

    position: Point
    radius: float = Field(gt=0)
    category: str
    instance_id: str
