from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from src.core.models.dynamics import ActionSpace
from src.core.models.perception import EgoGrid, ObservationStack

PolicyState = Any


class BasePolicy(ABC):
    name: str = "policy"

    def __init__(self, space: ActionSpace = ActionSpace(), grid: EgoGrid = EgoGrid()):
        self.space: ActionSpace = space
        self.grid: EgoGrid = grid

    def initial_state(self) -> PolicyState:
        """
        Return the memory a fresh episode starts with.

        Stateless policies return None. Recurrent policies return a zeroed
        hidden state. The value is treated as immutable: `act` must return a
        new object rather than mutating it, because rollout branches fork from
        a shared snapshot.
        """
        return None

    @abstractmethod
    def act(
        self,
        observation: ObservationStack,
        state: PolicyState,
        rng: np.random.Generator,
        epsilon: float = 0.0,
    ) -> tuple[int, PolicyState]:
        """
        Choose an action index for `observation`.

        This method must:
          - Return an index in [0, space.k) together with the next state.
          - With probability `epsilon`, choose uniformly over all K actions.
          - Draw randomness only from `rng`, so episodes replay exactly from
            their seeds regardless of which process runs them.
          - Not draw from `rng` at all when the choice is deterministic.
        """
        ...
