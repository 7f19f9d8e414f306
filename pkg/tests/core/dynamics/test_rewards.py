import numpy as np
import pytest

from src.core.dynamics.rewards import collision_reward, progress_reward
from src.core.models.dynamics import RewardParams


@pytest.fixture
def params() -> RewardParams:
    return RewardParams(agent_radius=0.16, clearance_threshold=1.0)


def test_collision_reward_at_threshold_is_one(params: RewardParams) -> None:
    assert collision_reward(1.0, params) == pytest.approx(1.0, abs=1e-12)


def test_collision_reward_at_radius_is_zero(params: RewardParams) -> None:
    assert collision_reward(0.16, params) == pytest.approx(0.0, abs=1e-12)


def test_collision_reward_saturates_far_from_obstacles(params: RewardParams) -> None:
    assert collision_reward(5.0, params) == 1.0


def test_collision_reward_is_floored(params: RewardParams) -> None:
    """Test that deep penetration never drops below -1"""
    assert collision_reward(-10.0, params) == -1.0


def test_collision_reward_linear_in_between(params: RewardParams) -> None:
    assert collision_reward(0.58, params) == pytest.approx(0.5, abs=1e-12)


def test_progress_reward_endpoints() -> None:
    assert progress_reward(0.0, 3.0) == pytest.approx(1.0, abs=1e-12)
    assert progress_reward(3.0, 3.0) == pytest.approx(0.0, abs=1e-12)


def test_progress_reward_never_negative() -> None:
    """Test that moving away from the goal costs nothing beyond zero progress"""
    assert progress_reward(7.5, 3.0) == 0.0


def test_reward_params_reject_radius_above_threshold() -> None:
    with pytest.raises(ValueError):
        RewardParams(agent_radius=1.2, clearance_threshold=1.0)


def test_collision_reward_grows_with_clearance(params: RewardParams) -> None:
    values = [collision_reward(d, params) for d in np.linspace(-2.0, 3.0, 501)]

    assert all(a <= b for a, b in zip(values, values[1:]))
    assert min(values) == -1.0 and max(values) == 1.0


@pytest.mark.parametrize("d_init", [0.5, 3.0, 12.0])
def test_progress_reward_shrinks_with_distance(d_init: float) -> None:
    values = [progress_reward(d, d_init) for d in np.linspace(0.0, 2.0 * d_init, 401)]

    assert all(a >= b for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 1.0 for v in values)
