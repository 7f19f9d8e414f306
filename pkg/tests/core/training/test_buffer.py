import logging

import numpy as np
import pytest

from src.core.config.config import RolloutConfig
from src.core.qnet.params import Variant
from src.core.rollouts.dense import dense_rollout
from src.core.training.buffer import EpisodeBuffer, EpisodeSample, to_sample
from src.core.training.fit import pad_batch
from tests.core.rollouts.scripted import CountingPolicy, LineSimulator


def _sample(length: int, value: float = 0.0) -> EpisodeSample:
    return EpisodeSample(
        inputs=np.full((length, 2, 4, 4), value),
        targets=np.full((length, 3), value),
        mask=np.ones((length, 3), dtype=bool),
    )


def test_buffer_evicts_oldest_episodes() -> None:
    buffer = EpisodeBuffer(capacity=10)
    for value, length in enumerate([4, 4, 4]):
        buffer.add(_sample(length, value))

    assert buffer.steps == 8
    assert [s.inputs[0, 0, 0, 0] for s in buffer] == [1.0, 2.0]


def test_buffer_skips_empty_episodes() -> None:
    buffer = EpisodeBuffer(capacity=10)
    buffer.add(_sample(0))

    assert len(buffer) == 0


def test_buffer_drops_oversized_episode(caplog: pytest.LogCaptureFixture) -> None:
    buffer = EpisodeBuffer(capacity=3)
    with caplog.at_level(logging.WARNING):
        buffer.add(_sample(5))

    assert len(buffer) == 0
    assert "larger than buffer capacity" in caplog.text


def test_buffer_capacity_must_be_positive() -> None:
    with pytest.raises(ValueError):
        EpisodeBuffer(capacity=0)


def test_pad_batch_masks_padding() -> None:
    xs, targets, mask = pad_batch([_sample(2, 1.0), _sample(4, 2.0)])

    assert xs.shape == (4, 2, 2, 4, 4)
    assert targets.shape == mask.shape == (4, 2, 3)
    assert not mask[2:, 0].any()
    assert mask[:, 1].all()
    assert not xs[2:, 0].any()


def test_to_sample_selects_variant_channels() -> None:
    dense = dense_rollout(LineSimulator(), CountingPolicy(), RolloutConfig(max_steps=4))

    sample = to_sample(dense, Variant.RECURRENT)

    assert sample.inputs.shape == (4, 4, 4, 4)
    np.testing.assert_array_equal(sample.targets, dense.q_targets)
