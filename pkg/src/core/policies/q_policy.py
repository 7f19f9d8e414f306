import numpy as np

from src.core.models.dynamics import ActionSpace
from src.core.models.perception import EgoGrid, ObservationStack
from src.core.policies.base_policy import BasePolicy, PolicyState
from src.core.qnet.network import ShapeMismatchError, forward, initial_hidden
from src.core.qnet.params import QPolicyParams


def select_action(q: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy; greedy ties go to the lowest index."""
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(len(q)))
    return int(np.argmax(q))


class QPolicy(BasePolicy):
    def __init__(
        self,
        params: QPolicyParams,
        space: ActionSpace = ActionSpace(),
        grid: EgoGrid = EgoGrid(),
    ):
        super().__init__(space, grid)
        if params.k != space.k:
            raise ShapeMismatchError("Q-vector", (space.k,), (params.k,))
        if params.n != grid.n:
            raise ShapeMismatchError("grid", (grid.n, grid.n), (params.n, params.n))
        self.params = params
        self.name = params.variant.value.replace("_", "-")

    def initial_state(self) -> PolicyState:
        if not self.params.variant.is_recurrent:
            return None
        return initial_hidden(self.params)

    def q_values(self, observation: ObservationStack, state: PolicyState) -> tuple[np.ndarray, PolicyState]:
        q, hidden = forward(self.params, observation, state)
        return q, hidden if self.params.variant.is_recurrent else None

    def act(
        self,
        observation: ObservationStack,
        state: PolicyState,
        rng: np.random.Generator,
        epsilon: float = 0.0,
    ) -> tuple[int, PolicyState]:
        q, state = self.q_values(observation, state)
        return select_action(q, epsilon, rng), state
