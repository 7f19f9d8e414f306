import logging
from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from src.core.qnet.params import Variant
from src.core.rollouts.dense import DenseTrajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeSample:
    """Network inputs and Monte Carlo targets of one episode."""

    inputs: np.ndarray  # (L, C, n, n)
    targets: np.ndarray  # (L, K)
    mask: np.ndarray  # (L, K) bool

    def __len__(self) -> int:
        return self.inputs.shape[0]


def to_sample(dense: DenseTrajectory, variant: Variant) -> EpisodeSample:
    inputs = np.stack(
        [s.observation.channels(variant.input_channels) for s in dense.base.steps]
    )
    return EpisodeSample(inputs, dense.q_targets.copy(), dense.q_mask.copy())


class EpisodeBuffer:
    """FIFO store of whole episodes holding at most ``capacity`` steps."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self._episodes: deque[EpisodeSample] = deque()
        self._steps = 0

    def __len__(self) -> int:
        return len(self._episodes)

    def __iter__(self) -> Iterator[EpisodeSample]:
        return iter(self._episodes)

    @property
    def steps(self) -> int:
        return self._steps

    def add(self, sample: EpisodeSample) -> None:
        if len(sample) == 0:
            return
        if len(sample) > self.capacity:
            logger.warning(
                "dropping %d-step episode larger than buffer capacity %d",
                len(sample),
                self.capacity,
            )
            return
        self._episodes.append(sample)
        self._steps += len(sample)
        while self._steps > self.capacity:
            evicted = self._episodes.popleft()
            self._steps -= len(evicted)

    def episodes(self) -> list[EpisodeSample]:
        return list(self._episodes)
