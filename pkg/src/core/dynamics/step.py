import math

import numpy as np

from src.core.dynamics.rewards import collision_reward, progress_reward
from src.core.models.dynamics import ActionSpace, RewardParams, StepOutcome, Terminal
from src.core.models.geometry import Pose, wrap_angle
from src.core.models.scenario import GoalSpec
from src.core.worldgen.environment import Environment


class InvalidActionError(Exception):
    def __init__(self, action: int, k: int):
        super().__init__(f"Action {action} is outside the action space (k={k}).")


class GoalNotFoundError(Exception):
    def __init__(self, env_id: str, goal: GoalSpec):
        target = goal.instance_id if goal.instance_id is not None else goal.category
        super().__init__(f"Environment '{env_id}' has no goal object matching '{target}'.")


def nearest_obstacle_distance(
    env: Environment, point: tuple[float, float] | np.ndarray, exclude: frozenset[str] = frozenset()
) -> float:
    """Distance to the closest wall or obstacle boundary; goal objects in
    ``exclude`` are ignored."""
    return float(env.clearance(np.asarray(point, dtype=np.float64)[None, :], exclude)[0])


def goal_distance(env: Environment, point: tuple[float, float] | np.ndarray, goal: GoalSpec) -> float:
    """Distance from ``point`` to the surface of the nearest matching goal object."""
    targets = env.goals_matching(goal)
    if not targets:
        raise GoalNotFoundError(env.id, goal)
    x, y = float(point[0]), float(point[1])
    return min(max(0.0, math.dist((x, y), g.position) - g.radius) for g in targets)


def step(
    env: Environment,
    pose: Pose,
    action: int,
    goal: GoalSpec,
    d_init: float,
    space: ActionSpace = ActionSpace(),
    rewards: RewardParams = RewardParams(),
) -> StepOutcome:
    """Apply one action: rotate by the bin angle, then sweep forward."""
    if not 0 <= action < space.k:
        raise InvalidActionError(action, space.k)
    exclude = env.excluded_ids(goal)
    geometry = env.geometry(exclude)
    r = rewards.agent_radius

    if action == space.stop:
        new_pose = pose
        terminal = Terminal.STOPPED
    else:
        heading = wrap_angle(pose.heading + space.angle(action))
        start = pose.position
        end = np.array(
            [
                pose.x + space.velocity * math.cos(heading),
                pose.y + space.velocity * math.sin(heading),
            ]
        )
        contact = geometry.sweep(start, end, r)
        if contact is None:
            new_pose = Pose(x=float(end[0]), y=float(end[1]), heading=heading)
            terminal = Terminal.NONE
        else:
            at = start + contact * (end - start)
            new_pose = Pose(x=float(at[0]), y=float(at[1]), heading=heading)
            terminal = Terminal.COLLISION

    d_o = float(geometry.clearance(new_pose.position[None, :])[0])
    if terminal == Terminal.COLLISION:
        # Contact registers as being inside the agent radius.
        d_o = min(d_o, math.nextafter(r, 0.0))
    d_t = goal_distance(env, new_pose.position, goal)
    r_c = collision_reward(d_o, rewards)
    r_g = progress_reward(d_t, d_init)
    return StepOutcome(
        new_pose=new_pose,
        reward=r_c + r_g,
        reward_parts=(r_c, r_g),
        d_o=d_o,
        d_t=d_t,
        terminal=terminal,
        success=terminal != Terminal.COLLISION and d_t < rewards.success_distance,
    )
