from src.constants import MIN_COLLISION_REWARD
from src.core.models.dynamics import RewardParams


def collision_reward(d_o: float, params: RewardParams) -> float:
    """R_c = min(1, (d_o - r) / (tau_d - r)), floored at -1."""
    r = params.agent_radius
    value = min(1.0, (d_o - r) / (params.clearance_threshold - r))
    return max(value, MIN_COLLISION_REWARD)


def progress_reward(d_t: float, d_init: float) -> float:
    """R_g = max(0, 1 - min(d_t, d_init) / d_init)."""
    return max(0.0, 1.0 - min(d_t, d_init) / d_init)
