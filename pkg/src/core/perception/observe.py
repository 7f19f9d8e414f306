from dataclasses import dataclass

import numpy as np

from src.core.models.geometry import Pose
from src.core.models.perception import EgoGrid, ObservationStack, PerceptionParams
from src.core.models.scenario import GoalSpec
from src.core.perception.maps import collision_map, flow_map, semantic_map
from src.core.worldgen.environment import Environment


@dataclass(frozen=True)
class Frame:
    """Collision and semantic maps for a single pose."""

    phi_c: np.ndarray
    phi_s: np.ndarray


def render_frame(
    env: Environment,
    pose: Pose,
    goal: GoalSpec,
    grid: EgoGrid = EgoGrid(),
    params: PerceptionParams = PerceptionParams(),
    scenario_seed: int = 0,
    step: int = 0,
) -> Frame:
    return Frame(
        phi_c=collision_map(env, pose, grid, env.excluded_ids(goal)),
        phi_s=semantic_map(env, pose, goal, grid, params, scenario_seed, step),
    )


def stack_frames(
    current: Frame,
    previous: Frame,
    pose_t: Pose,
    pose_prev: Pose,
    grid: EgoGrid = EgoGrid(),
) -> ObservationStack:
    return ObservationStack(
        phi_c_t=current.phi_c,
        phi_c_prev=previous.phi_c,
        phi_s_t=current.phi_s,
        phi_s_prev=previous.phi_s,
        psi=flow_map(pose_prev, pose_t, grid),
    )


def observe(
    env: Environment,
    pose_t: Pose,
    pose_prev: Pose,
    goal: GoalSpec,
    grid: EgoGrid = EgoGrid(),
    params: PerceptionParams = PerceptionParams(),
    scenario_seed: int = 0,
    step: int = 0,
) -> ObservationStack:
    """Observation at ``step``; at step 0 the previous channels repeat the current ones.

    The previous frame is rendered with the noise stream of ``step - 1`` so
    it matches what was observed one step earlier.
    """
    current = render_frame(env, pose_t, goal, grid, params, scenario_seed, step)
    if step == 0:
        return stack_frames(current, current, pose_t, pose_t, grid)
    previous = render_frame(env, pose_prev, goal, grid, params, scenario_seed, step - 1)
    return stack_frames(current, previous, pose_t, pose_prev, grid)
