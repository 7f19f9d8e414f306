import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr
from scipy import ndimage

from src.constants import (
    DEFAULT_AGENT_RADIUS,
    ENV_FORMAT,
    FREE_SPACE_RESOLUTION,
    MIN_POCKET_AREA,
)
from src.core.models.geometry import (
    Bounds,
    CircleObstacle,
    GoalObject,
    Obstacle,
    PolygonObstacle,
    Segment,
)
from src.core.models.scenario import GoalMode, GoalSpec
from src.core.worldgen.geometry import CollisionGeometry, ccw_vertices, is_convex

logger = logging.getLogger(__name__)


class InvalidEnvironmentError(Exception):
    def __init__(self, env_id: str, reason: str):
        self.env_id = env_id
        super().__init__(f"Environment '{env_id}' is invalid: {reason}")


class ObstacleOutOfBoundsError(InvalidEnvironmentError):
    def __init__(self, env_id: str, what: str):
        super().__init__(env_id, f"{what} is not strictly inside bounds")


class OverlappingGoalObjectsError(InvalidEnvironmentError):
    def __init__(self, env_id: str, first: str, second: str):
        super().__init__(env_id, f"goal objects '{first}' and '{second}' overlap")


class EmptyFreeSpaceError(InvalidEnvironmentError):
    def __init__(self, env_id: str):
        super().__init__(env_id, "free space is empty")


class FreeSpaceDisconnectedError(InvalidEnvironmentError):
    def __init__(self, env_id: str, areas: list[float]):
        listed = ", ".join(f"{a:.2f} m^2" for a in areas)
        super().__init__(env_id, f"free space disconnected (components: {listed})")


class EnvironmentSpec(BaseModel):
    """Serializable description of a floorplan."""

    model_config = ConfigDict(frozen=True)

    format: Literal["divis-env/1"] = ENV_FORMAT
    id: str
    bounds: Bounds
    walls: list[Segment] = []
    obstacles: list[Obstacle] = []
    goal_objects: list[GoalObject] = []


@dataclass(frozen=True)
class FreeSpaceMap:
    """Raster of cells whose clearance exceeds the agent radius.

    ``main`` marks the largest connected component; scenario sampling only
    draws from it.
    """

    origin: tuple[float, float]
    resolution: float
    main: np.ndarray  # (ny, nx) bool
    clearance: np.ndarray  # (ny, nx) meters

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        col = int(math.floor((x - self.origin[0]) / self.resolution))
        row = int(math.floor((y - self.origin[1]) / self.resolution))
        return row, col

    def in_main(self, x: float, y: float) -> bool:
        row, col = self.cell_of(x, y)
        if not (0 <= row < self.main.shape[0] and 0 <= col < self.main.shape[1]):
            return False
        return bool(self.main[row, col])

    @property
    def main_area(self) -> float:
        return float(self.main.sum()) * self.resolution**2


class Environment(EnvironmentSpec):
    """A validated floorplan with cached collision geometry and free space."""

    _geometry_cache: dict[frozenset[str], CollisionGeometry] = PrivateAttr(
        default_factory=dict
    )
    _free_space: FreeSpaceMap | None = PrivateAttr(default=None)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EnvironmentSpec):
            return NotImplemented
        return self.model_dump() == other.model_dump()

    __hash__ = None  # type: ignore[assignment]

    @property
    def free_space(self) -> FreeSpaceMap:
        if self._free_space is None:
            raise RuntimeError("environment was not built with build_environment()")
        return self._free_space

    def goal_object(self, instance_id: str) -> GoalObject | None:
        for goal in self.goal_objects:
            if goal.instance_id == instance_id:
                return goal
        return None

    def goals_matching(self, goal: GoalSpec) -> list[GoalObject]:
        if goal.mode == GoalMode.GOAL_IMAGE:
            return [g for g in self.goal_objects if g.instance_id == goal.instance_id]
        return [g for g in self.goal_objects if g.category == goal.category]

    def excluded_ids(self, goal: GoalSpec) -> frozenset[str]:
        return frozenset(g.instance_id for g in self.goals_matching(goal))

    def geometry(self, exclude: frozenset[str] = frozenset()) -> CollisionGeometry:
        """Collision geometry with the listed goal instances left out."""
        cached = self._geometry_cache.get(exclude)
        if cached is None:
            cached = _compile_geometry(self, exclude)
            self._geometry_cache[exclude] = cached
        return cached

    def clearance(self, points: np.ndarray, exclude: frozenset[str] = frozenset()) -> np.ndarray:
        return self.geometry(exclude).clearance(points)

    def to_spec(self) -> EnvironmentSpec:
        return EnvironmentSpec.model_validate(self.model_dump())

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2))

    @classmethod
    def load(cls, path: str | Path, agent_radius: float = DEFAULT_AGENT_RADIUS) -> "Environment":
        spec = EnvironmentSpec.model_validate_json(Path(path).read_text())
        return build_environment(spec, agent_radius=agent_radius)


def _compile_geometry(env: EnvironmentSpec, exclude: frozenset[str]) -> CollisionGeometry:
    segments: list[tuple[tuple[float, float], tuple[float, float]]] = []
    for edge in env.bounds.edges():
        segments.append((edge.start, edge.end))
    for wall in env.walls:
        segments.append((wall.start, wall.end))
    polygons: list[np.ndarray] = []
    discs: list[tuple[float, float, float]] = []
    for obstacle in env.obstacles:
        if isinstance(obstacle, PolygonObstacle):
            vertices = ccw_vertices(np.asarray(obstacle.vertices, dtype=np.float64))
            polygons.append(vertices)
            for i in range(len(vertices)):
                a, b = vertices[i], vertices[(i + 1) % len(vertices)]
                segments.append(((a[0], a[1]), (b[0], b[1])))
        else:
            discs.append((obstacle.center[0], obstacle.center[1], obstacle.radius))
    for goal in env.goal_objects:
        if goal.instance_id not in exclude:
            discs.append((goal.position[0], goal.position[1], goal.radius))
    return CollisionGeometry(
        np.asarray(segments, dtype=np.float64).reshape(-1, 2, 2),
        np.asarray(discs, dtype=np.float64).reshape(-1, 3),
        polygons,
    )


def _validate_layout(spec: EnvironmentSpec) -> None:
    bounds = spec.bounds
    if bounds.width <= 0 or bounds.height <= 0:
        raise InvalidEnvironmentError(spec.id, "bounds have no area")
    for i, obstacle in enumerate(spec.obstacles):
        if isinstance(obstacle, PolygonObstacle):
            vertices = np.asarray(obstacle.vertices, dtype=np.float64)
            if len(vertices) < 3 or not is_convex(vertices):
                raise InvalidEnvironmentError(spec.id, f"obstacle {i} is not a convex polygon")
            if not all(bounds.contains_strictly(x, y) for x, y in obstacle.vertices):
                raise ObstacleOutOfBoundsError(spec.id, f"obstacle {i}")
        elif isinstance(obstacle, CircleObstacle):
            if not _disc_inside(bounds, obstacle.center, obstacle.radius):
                raise ObstacleOutOfBoundsError(spec.id, f"obstacle {i}")
    for wall in spec.walls:
        for x, y in (wall.start, wall.end):
            if not (bounds.xmin <= x <= bounds.xmax and bounds.ymin <= y <= bounds.ymax):
                raise ObstacleOutOfBoundsError(spec.id, f"wall {wall.start}->{wall.end}")

    seen: dict[str, GoalObject] = {}
    for goal in spec.goal_objects:
        if goal.instance_id in seen:
            raise InvalidEnvironmentError(
                spec.id, f"duplicate goal instance id '{goal.instance_id}'"
            )
        if not _disc_inside(bounds, goal.position, goal.radius):
            raise ObstacleOutOfBoundsError(spec.id, f"goal object '{goal.instance_id}'")
        for other in seen.values():
            gap = math.dist(goal.position, other.position)
            if gap < goal.radius + other.radius:
                raise OverlappingGoalObjectsError(spec.id, other.instance_id, goal.instance_id)
        seen[goal.instance_id] = goal


def _disc_inside(bounds: Bounds, centre: tuple[float, float], radius: float) -> bool:
    x, y = centre
    return (
        bounds.xmin < x - radius
        and x + radius < bounds.xmax
        and bounds.ymin < y - radius
        and y + radius < bounds.ymax
    )


def _free_space_map(
    env: Environment, agent_radius: float, resolution: float
) -> FreeSpaceMap:
    bounds = env.bounds
    nx = max(int(math.ceil(bounds.width / resolution)), 1)
    ny = max(int(math.ceil(bounds.height / resolution)), 1)
    xs = bounds.xmin + (np.arange(nx) + 0.5) * resolution
    ys = bounds.ymin + (np.arange(ny) + 0.5) * resolution
    gx, gy = np.meshgrid(xs, ys)
    centres = np.stack([gx.ravel(), gy.ravel()], axis=1)
    clearance = env.geometry().clearance(centres).reshape(ny, nx)
    free = clearance > agent_radius
    if not free.any():
        raise EmptyFreeSpaceError(env.id)

    labels, count = ndimage.label(free, structure=np.ones((3, 3), dtype=bool))
    sizes = np.bincount(labels.ravel())[1:]
    main_label = int(np.argmax(sizes)) + 1
    areas = sorted((float(s) * resolution**2 for s in sizes), reverse=True)
    if len(areas) > 1 and areas[1] >= MIN_POCKET_AREA:
        raise FreeSpaceDisconnectedError(env.id, areas)
    if count > 1:
        logger.debug("%s: ignoring %d small free-space pockets", env.id, count - 1)
    return FreeSpaceMap(
        origin=(bounds.xmin, bounds.ymin),
        resolution=resolution,
        main=labels == main_label,
        clearance=clearance,
    )


def build_environment(
    spec: EnvironmentSpec,
    agent_radius: float = DEFAULT_AGENT_RADIUS,
    resolution: float = FREE_SPACE_RESOLUTION,
) -> Environment:
    """Validate ``spec`` and precompute its distance and free-space structures."""
    _validate_layout(spec)
    env = Environment.model_validate(spec.model_dump())
    env._free_space = _free_space_map(env, agent_radius, resolution)
    logger.debug("built environment %s (free area %.1f m^2)", env.id, env.free_space.main_area)
    return env
