import numpy as np

from src.core.models.dynamics import ActionSpace
from src.core.models.perception import EgoGrid, ObservationStack
from src.core.policies.base_policy import BasePolicy, PolicyState
from src.core.qnet.network import ShapeMismatchError


def random_action(rng: np.random.Generator, k: int) -> int:
    return int(rng.integers(k))


def _column_to_bin(score: np.ndarray, space: ActionSpace, grid: EgoGrid) -> int:
    if np.all(score == score.flat[0]):
        return space.center_bin
    _, col = np.unravel_index(int(np.argmax(score)), score.shape)
    return space.nearest_bin(float(grid.bearings[col]))


def vgm_action(
    phi_s: np.ndarray, space: ActionSpace = ActionSpace(), grid: EgoGrid = EgoGrid()
) -> int:
    """Turn toward the strongest goal match; go straight when nothing matches."""
    return _column_to_bin(np.asarray(phi_s), space, grid)


def vgm_collision_action(
    phi_s: np.ndarray,
    phi_c: np.ndarray,
    space: ActionSpace = ActionSpace(),
    grid: EgoGrid = EgoGrid(),
) -> int:
    """Like vgm_action, over the goal match plus free space (1 - phi_c)."""
    phi_s, phi_c = np.asarray(phi_s), np.asarray(phi_c)
    if phi_s.shape != phi_c.shape:
        raise ShapeMismatchError("collision map", phi_s.shape, phi_c.shape)
    return _column_to_bin(phi_s + (1.0 - phi_c), space, grid)


def _explore(rng: np.random.Generator, epsilon: float) -> bool:
    return epsilon > 0.0 and rng.random() < epsilon


class RandomPolicy(BasePolicy):
    name = "random"

    def act(
        self,
        observation: ObservationStack,
        state: PolicyState,
        rng: np.random.Generator,
        epsilon: float = 0.0,
    ) -> tuple[int, PolicyState]:
        return random_action(rng, self.space.k), state


class VGMPolicy(BasePolicy):
    name = "vgm"

    def act(
        self,
        observation: ObservationStack,
        state: PolicyState,
        rng: np.random.Generator,
        epsilon: float = 0.0,
    ) -> tuple[int, PolicyState]:
        if _explore(rng, epsilon):
            return random_action(rng, self.space.k), state
        return vgm_action(observation.phi_s_t, self.space, self.grid), state


class VGMCollisionPolicy(BasePolicy):
    name = "vgm-collision"

    def act(
        self,
        observation: ObservationStack,
        state: PolicyState,
        rng: np.random.Generator,
        epsilon: float = 0.0,
    ) -> tuple[int, PolicyState]:
        if _explore(rng, epsilon):
            return random_action(rng, self.space.k), state
        action = vgm_collision_action(
            observation.phi_s_t, observation.phi_c_t, self.space, self.grid
        )
        return action, state
