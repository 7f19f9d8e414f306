from pathlib import Path

import numpy as np
import pytest

from src.core.models.dynamics import ActionSpace
from src.core.models.perception import EgoGrid, ObservationStack
from src.core.policies.factory import (
    CheckpointVariantError,
    MissingCheckpointError,
    PolicyKind,
    make_policy,
)
from src.core.policies.q_policy import QPolicy, select_action
from src.core.qnet.checkpoint import save_checkpoint
from src.core.qnet.network import ShapeMismatchError, forward
from src.core.qnet.params import Variant, init_params

GRID = EgoGrid(n=8)
SPACE = ActionSpace(k=5)


@pytest.fixture
def observation() -> ObservationStack:
    rng = np.random.default_rng(0)
    maps = rng.uniform(size=(4, 8, 8))
    return ObservationStack(maps[0], maps[1], maps[2], maps[3], rng.normal(size=(8, 8, 2)))


def test_select_action_greedy_ties_go_low() -> None:
    rng = np.random.default_rng(0)
    before = rng.bit_generator.state

    assert select_action(np.array([0.1, 0.7, 0.7, 0.2]), 0.0, rng) == 1
    assert rng.bit_generator.state == before


def test_select_action_explores() -> None:
    rng = np.random.default_rng(1)
    actions = {select_action(np.array([0.0, 1.0, 0.0]), 1.0, rng) for _ in range(100)}

    assert actions == {0, 1, 2}


def test_q_policy_acts_greedily(observation: ObservationStack) -> None:
    params = init_params(Variant.RECURRENT_FLOW, 8, 5, seed=2, hidden=4)
    policy = QPolicy(params, SPACE, GRID)
    state = policy.initial_state()

    action, new_state = policy.act(observation, state, np.random.default_rng(0))

    q, hidden = forward(params, observation, state)
    assert action == int(np.argmax(q))
    np.testing.assert_array_equal(new_state, hidden)
    assert not state.any()
    assert policy.name == "recurrent-flow"


def test_reactive_policy_has_no_state(observation: ObservationStack) -> None:
    policy = QPolicy(init_params(Variant.REACTIVE, 8, 5, hidden=2), SPACE, GRID)

    _, state = policy.act(observation, policy.initial_state(), np.random.default_rng(0))

    assert policy.initial_state() is None
    assert state is None


def test_q_policy_action_space_mismatch() -> None:
    with pytest.raises(ShapeMismatchError):
        QPolicy(init_params(Variant.REACTIVE, 8, 9, hidden=2), SPACE, GRID)


def test_make_baseline_policies() -> None:
    assert make_policy("random", SPACE, GRID).name == "random"
    assert make_policy(PolicyKind.VGM_COLLISION, SPACE, GRID).name == "vgm-collision"


def test_make_q_policy_needs_checkpoint() -> None:
    with pytest.raises(MissingCheckpointError):
        make_policy("recurrent", SPACE, GRID)


def test_make_q_policy_from_checkpoint(tmp_path: Path) -> None:
    path = tmp_path / "recurrent.bin"
    save_checkpoint(path, init_params(Variant.RECURRENT, 8, 5, hidden=2))

    policy = make_policy("recurrent", SPACE, GRID, path)

    assert isinstance(policy, QPolicy)
    with pytest.raises(CheckpointVariantError):
        make_policy("recurrent-flow", SPACE, GRID, path)
