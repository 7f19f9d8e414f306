import numpy as np
import pytest
from scipy import stats

from src.core.models.dynamics import ActionSpace
from src.core.models.perception import EgoGrid, ObservationStack
from src.core.policies.baselines import (
    RandomPolicy,
    VGMPolicy,
    random_action,
    vgm_action,
    vgm_collision_action,
)
from src.core.qnet.network import ShapeMismatchError

GRID = EgoGrid()
SPACE = ActionSpace()


def _stack(phi_s: np.ndarray, phi_c: np.ndarray | None = None) -> ObservationStack:
    phi_c = np.zeros_like(phi_s) if phi_c is None else phi_c
    return ObservationStack(phi_c, phi_c, phi_s, phi_s, np.zeros((*phi_s.shape, 2)))


@pytest.mark.parametrize("column, action", [(0, 1), (15, 6), (4, 2)])
def test_vgm_turns_toward_peak(column: int, action: int) -> None:
    phi_s = np.zeros((16, 16))
    phi_s[5, column] = 0.9

    assert vgm_action(phi_s, SPACE, GRID) == action


def test_vgm_without_match_goes_to_center_bin() -> None:
    assert vgm_action(np.zeros((16, 16)), SPACE, GRID) == SPACE.center_bin


def test_vgm_collision_prefers_free_columns() -> None:
    """Test that free space steers the agent when no goal is matched"""
    phi_c = np.ones((16, 16))
    phi_c[:, 12] = 0.0

    assert vgm_collision_action(np.zeros((16, 16)), phi_c, SPACE, GRID) == 5


def test_vgm_collision_follows_a_free_goal_peak() -> None:
    """Test that a matched goal in free space outscores every free cell"""
    phi_s = np.zeros((16, 16))
    phi_s[5, 0] = 1.0
    phi_c = np.zeros((16, 16))
    phi_c[9:, :] = 1.0

    assert vgm_collision_action(phi_s, phi_c, SPACE, GRID) == vgm_action(phi_s, SPACE, GRID) == 1


def test_vgm_collision_leaves_an_occupied_goal_peak() -> None:
    phi_s = np.zeros((16, 16))
    phi_s[5, 0] = 1.0
    phi_c = np.ones((16, 16))
    phi_c[:, 12] = 0.0

    assert vgm_action(phi_s, SPACE, GRID) == 1
    assert vgm_collision_action(phi_s, phi_c, SPACE, GRID) == 5


def test_vgm_collision_shape_mismatch() -> None:
    with pytest.raises(ShapeMismatchError):
        vgm_collision_action(np.zeros((16, 16)), np.zeros((8, 8)), SPACE, GRID)


def test_vgm_policy_ignores_rng_when_greedy() -> None:
    rng = np.random.default_rng(0)
    before = rng.bit_generator.state
    phi_s = np.zeros((16, 16))
    phi_s[3, 0] = 1.0

    action, state = VGMPolicy(SPACE, GRID).act(_stack(phi_s), None, rng)

    assert action == 1
    assert state is None
    assert rng.bit_generator.state == before


def test_random_action_is_uniform() -> None:
    """Test the random baseline with a chi-squared goodness-of-fit check"""
    rng = np.random.default_rng(2024)
    draws = [random_action(rng, SPACE.k) for _ in range(9000)]

    counts = np.bincount(draws, minlength=SPACE.k)
    assert stats.chisquare(counts).pvalue > 1e-3


def test_random_policy_replays_from_seed() -> None:
    policy = RandomPolicy(SPACE, GRID)
    obs = _stack(np.zeros((16, 16)))

    first = [policy.act(obs, None, rng)[0] for rng in [np.random.default_rng(5)] * 20]
    second = [policy.act(obs, None, rng)[0] for rng in [np.random.default_rng(5)] * 20]

    assert first == second
