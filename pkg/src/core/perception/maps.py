"""Egocentric maps rendered directly from environment geometry.

All maps share the EgoGrid layout: rows are range bins (near to far),
columns are bearing bins across the field of view (left to right).
"""

import math

import numpy as np

from src.core.models.geometry import Pose, wrap_angle
from src.core.models.perception import EgoGrid, PerceptionParams
from src.core.models.scenario import GoalSpec
from src.core.perception.noise import apply_noise, gaussian_blob, noise_rng
from src.core.worldgen.environment import Environment
from src.core.worldgen.sampling import goal_sighting

# Guards hits that land on a row boundary against rounding down a row.
_ROW_EPS = 1e-9


def collision_map(
    env: Environment,
    pose: Pose,
    grid: EgoGrid = EgoGrid(),
    exclude: frozenset[str] = frozenset(),
) -> np.ndarray:
    """Occupancy within ``grid.max_range``; cells at and behind the first hit are 1."""
    hits = env.geometry(exclude).cast_rays(pose.position, pose.heading + grid.bearings)
    first_row = np.floor(hits / grid.row_height + _ROW_EPS)
    rows = np.arange(grid.n, dtype=np.float64)[:, None]
    return (rows >= first_row[None, :]).astype(np.float64)


def semantic_peaks(env: Environment, pose: Pose, goal: GoalSpec, grid: EgoGrid) -> np.ndarray:
    """Noiseless goal-match map: one unit peak per visible matching object."""
    out = np.zeros((grid.n, grid.n), dtype=np.float64)
    for target in env.goals_matching(goal):
        sighting = goal_sighting(env, pose.x, pose.y, target, grid.sight_range)
        if sighting is None:
            continue
        bearing = wrap_angle(sighting[0] - pose.heading)
        if not grid.in_view(bearing):
            continue
        row, col = grid.row_of(sighting[1]), grid.column_of(bearing)
        out = np.maximum(out, gaussian_blob(grid.n, row, col))
    return out


def semantic_map(
    env: Environment,
    pose: Pose,
    goal: GoalSpec,
    grid: EgoGrid = EgoGrid(),
    params: PerceptionParams = PerceptionParams(),
    scenario_seed: int = 0,
    step: int = 0,
) -> np.ndarray:
    base = semantic_peaks(env, pose, goal, grid)
    if params.is_noiseless:
        return base
    return apply_noise(base, params, noise_rng(params, scenario_seed, step))


def flow_map(pose_prev: Pose, pose_t: Pose, grid: EgoGrid = EgoGrid()) -> np.ndarray:
    """Egomotion flow in cell units.

    Each cell's anchor point (row centre range, column centre bearing) in the
    previous frame is re-expressed in the current frame. Channel 0 is the
    column shift, channel 1 the number of rows the anchor came closer.
    """
    rho = np.broadcast_to(grid.row_centers[:, None], (grid.n, grid.n))
    beta = np.broadcast_to(grid.bearings[None, :], (grid.n, grid.n))
    psi = np.zeros((grid.n, grid.n, 2), dtype=np.float64)

    d_theta = wrap_angle(pose_t.heading - pose_prev.heading)
    dx, dy = pose_t.x - pose_prev.x, pose_t.y - pose_prev.y
    if dx == 0.0 and dy == 0.0:
        psi[..., 0] = d_theta / grid.column_width
        return psi

    c, s = math.cos(pose_prev.heading), math.sin(pose_prev.heading)
    tx, ty = c * dx + s * dy, -s * dx + c * dy
    px = rho * np.cos(beta) - tx
    py = rho * np.sin(beta) - ty
    cd, sd = math.cos(d_theta), math.sin(d_theta)
    qx, qy = cd * px + sd * py, -sd * px + cd * py
    new_rho = np.hypot(qx, qy)
    new_beta = np.arctan2(qy, qx)
    shift = np.arctan2(np.sin(new_beta - beta), np.cos(new_beta - beta))
    psi[..., 0] = -shift / grid.column_width
    psi[..., 1] = (rho - new_rho) / grid.row_height
    return psi
