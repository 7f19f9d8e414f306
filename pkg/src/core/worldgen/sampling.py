import logging
import math

import numpy as np

from src.constants import DEFAULT_AGENT_RADIUS, SCENARIO_MAX_RETRIES
from src.core.models.geometry import GoalObject, Pose, wrap_angle
from src.core.models.perception import EgoGrid
from src.core.models.scenario import GoalMode, GoalSpec, Scenario, Split
from src.core.rng import derive_rng
from src.core.worldgen.environment import Environment

logger = logging.getLogger(__name__)

# Re-oriented headings keep the goal this far inside the field of view.
_REORIENT_MARGIN = 0.8


class ScenarioSamplingError(Exception):
    def __init__(self, env_id: str, attempts: int, what: str = "a pose that sees a goal"):
        super().__init__(
            f"Could not sample {what} in environment '{env_id}' after {attempts} attempts."
        )


def is_free(env: Environment, x: float, y: float, radius: float = DEFAULT_AGENT_RADIUS) -> bool:
    if not env.free_space.in_main(x, y):
        return False
    return bool(env.clearance(np.array([[x, y]]))[0] > radius)


def sample_free_point(
    env: Environment,
    rng: np.random.Generator,
    radius: float = DEFAULT_AGENT_RADIUS,
    max_retries: int = SCENARIO_MAX_RETRIES,
) -> tuple[float, float]:
    """Uniform point over the main free-space component with clearance > radius."""
    b = env.bounds
    for _ in range(max_retries):
        x = float(rng.uniform(b.xmin, b.xmax))
        y = float(rng.uniform(b.ymin, b.ymax))
        if is_free(env, x, y, radius):
            return x, y
    raise ScenarioSamplingError(env.id, max_retries, "a free point")


def goal_sighting(
    env: Environment, x: float, y: float, goal: GoalObject, sight_range: float
) -> tuple[float, float] | None:
    """World bearing and centre distance of ``goal`` if it is in line of sight."""
    dx, dy = goal.position[0] - x, goal.position[1] - y
    distance = math.hypot(dx, dy)
    if distance > sight_range or distance <= goal.radius:
        return None
    bearing = math.atan2(dy, dx)
    geometry = env.geometry(frozenset({goal.instance_id}))
    hit = geometry.cast_rays(np.array([x, y]), np.array([bearing]))[0]
    if hit < distance - goal.radius:
        return None
    return bearing, distance


def visible_goals(
    env: Environment, pose: Pose, grid: EgoGrid, goals: list[GoalObject] | None = None
) -> list[GoalObject]:
    """Goal objects inside the field of view and in line of sight from ``pose``."""
    found = []
    for goal in env.goal_objects if goals is None else goals:
        sighting = goal_sighting(env, pose.x, pose.y, goal, grid.sight_range)
        if sighting is not None and grid.in_view(wrap_angle(sighting[0] - pose.heading)):
            found.append(goal)
    return found


def sample_scenario(
    env: Environment,
    goal_mode: GoalMode,
    rng_seed: int,
    grid: EgoGrid = EgoGrid(),
    agent_radius: float = DEFAULT_AGENT_RADIUS,
    split: Split = Split.SEEN,
    max_retries: int = SCENARIO_MAX_RETRIES,
) -> Scenario:
    """Sample a start pose uniformly over free space with a goal in view."""
    rng = derive_rng(rng_seed, "scenario")
    b = env.bounds
    for _ in range(max_retries):
        x = float(rng.uniform(b.xmin, b.xmax))
        y = float(rng.uniform(b.ymin, b.ymax))
        heading = float(rng.uniform(0.0, 2.0 * math.pi))
        if not is_free(env, x, y, agent_radius):
            continue
        sightings = []
        for goal in env.goal_objects:
            seen = goal_sighting(env, x, y, goal, grid.sight_range)
            if seen is not None:
                sightings.append((goal, seen[0]))
        if not sightings:
            continue

        in_view = [g for g, bearing in sightings if grid.in_view(wrap_angle(bearing - heading))]
        if not in_view:
            _, bearing = min(sightings, key=lambda s: abs(wrap_angle(s[1] - heading)))
            offset = rng.uniform(-_REORIENT_MARGIN, _REORIENT_MARGIN) * grid.fov / 2.0
            heading = float((bearing + offset) % (2.0 * math.pi))
            in_view = [
                g for g, bear in sightings if grid.in_view(wrap_angle(bear - heading))
            ]
        chosen = in_view[int(rng.integers(len(in_view)))]
        if goal_mode == GoalMode.GOAL_IMAGE:
            goal = GoalSpec.for_instance(chosen.instance_id)
        else:
            goal = GoalSpec.for_category(chosen.category)
        return Scenario(
            env_id=env.id,
            start_pose=Pose(x=x, y=y, heading=heading),
            goal=goal,
            seed=rng_seed,
            split=split,
        )
    raise ScenarioSamplingError(env.id, max_retries)
