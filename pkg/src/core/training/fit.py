import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from src.core.qnet.network import loss_and_gradients
from src.core.qnet.optimizer import Adam
from src.core.qnet.params import QPolicyParams
from src.core.rng import derive_rng
from src.core.training.buffer import EpisodeSample

logger = logging.getLogger(__name__)


class FitDivergedError(Exception):
    def __init__(self, epoch: int, minibatch: int, value: float):
        super().__init__(
            f"Loss became non-finite ({value}) at epoch {epoch}, minibatch {minibatch}; "
            "lower the learning rate or check the targets."
        )


@dataclass
class FitStats:
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def initial_loss(self) -> float:
        return self.epoch_losses[0] if self.epoch_losses else 0.0

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else 0.0


def pad_batch(samples: Sequence[EpisodeSample]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack episodes time-major, zero-padding shorter ones with masked-out steps."""
    steps = max(len(s) for s in samples)
    first = samples[0]
    xs = np.zeros((steps, len(samples), *first.inputs.shape[1:]), dtype=np.float64)
    targets = np.zeros((steps, len(samples), first.targets.shape[1]), dtype=np.float64)
    mask = np.zeros(targets.shape, dtype=np.float64)
    for b, sample in enumerate(samples):
        length = len(sample)
        xs[:length, b] = sample.inputs
        targets[:length, b] = sample.targets
        mask[:length, b] = sample.mask
    return xs, targets, mask


def fit(
    params: QPolicyParams,
    dataset: Sequence[EpisodeSample],
    epochs: int,
    learning_rate: float = 1e-3,
    minibatch_episodes: int = 0,
    seed: int = 0,
    optimizer: Adam | None = None,
) -> tuple[QPolicyParams, FitStats]:
    """Run ``epochs`` passes of Adam over ``dataset``.

    Each epoch visits the episodes in a seeded random order, in minibatches of
    ``minibatch_episodes`` (0 means one minibatch holding everything). The
    recorded epoch loss is the mean minibatch loss before each update.
    """
    if not dataset:
        raise ValueError("fit needs at least one episode")
    optimizer = optimizer if optimizer is not None else Adam(learning_rate)
    size = minibatch_episodes if minibatch_episodes > 0 else len(dataset)
    stats = FitStats()
    for epoch in range(epochs):
        order = derive_rng(seed, "fit", epoch).permutation(len(dataset))
        losses = []
        for index, start in enumerate(range(0, len(dataset), size)):
            batch = [dataset[i] for i in order[start : start + size]]
            value, grads = loss_and_gradients(params, *pad_batch(batch))
            if not math.isfinite(value):
                raise FitDivergedError(epoch, index, value)
            losses.append(value)
            params = optimizer.step(params, grads)
        stats.epoch_losses.append(float(np.mean(losses)))
        logger.debug("fit epoch %d: loss %.6f", epoch, stats.epoch_losses[-1])
    return params, stats
