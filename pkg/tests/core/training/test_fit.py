import numpy as np
import pytest

from src.core.qnet.network import forward_sequence
from src.core.qnet.params import Variant, init_params
from src.core.training.buffer import EpisodeSample
from src.core.training.fit import FitDivergedError, fit


@pytest.fixture
def dataset() -> list[EpisodeSample]:
    """Four short episodes whose every action is worth 0.5"""
    rng = np.random.default_rng(0)
    return [
        EpisodeSample(
            inputs=rng.uniform(size=(length, 2, 4, 4)),
            targets=np.full((length, 3), 0.5),
            mask=np.ones((length, 3), dtype=bool),
        )
        for length in (2, 3, 3, 4)
    ]


def test_fit_reduces_loss(dataset: list[EpisodeSample]) -> None:
    params = init_params(Variant.REACTIVE, 4, 3, seed=0, hidden=2)

    fitted, stats = fit(params, dataset, epochs=30, learning_rate=0.01)

    assert len(stats.epoch_losses) == 30
    assert stats.final_loss < stats.initial_loss
    assert fitted.tensors["head_b"].dtype == np.float32


def test_fit_is_deterministic(dataset: list[EpisodeSample]) -> None:
    params = init_params(Variant.REACTIVE, 4, 3, seed=0, hidden=2)

    first, _ = fit(params, dataset, epochs=3, minibatch_episodes=2, seed=4)
    second, _ = fit(params, dataset, epochs=3, minibatch_episodes=2, seed=4)

    for name, tensor in first.tensors.items():
        np.testing.assert_array_equal(tensor, second.tensors[name])


def test_fit_needs_data() -> None:
    with pytest.raises(ValueError):
        fit(init_params(Variant.REACTIVE, 4, 3, hidden=2), [], epochs=1)


def test_non_finite_loss_raises(dataset: list[EpisodeSample]) -> None:
    broken = [
        EpisodeSample(s.inputs, np.full_like(s.targets, np.inf), s.mask) for s in dataset
    ]
    with pytest.raises(FitDivergedError):
        fit(init_params(Variant.REACTIVE, 4, 3, hidden=2), broken, epochs=1)


def test_zero_epochs_leave_params_alone(dataset: list[EpisodeSample]) -> None:
    params = init_params(Variant.RECURRENT, 4, 3, seed=2, hidden=2)

    fitted, stats = fit(params, dataset, epochs=0)

    for name, tensor in params.tensors.items():
        np.testing.assert_array_equal(fitted.tensors[name], tensor)
    assert stats.epoch_losses == []
    assert stats.initial_loss == stats.final_loss == 0.0


def test_overfitting_one_episode_lowers_loss_every_epoch(dataset: list[EpisodeSample]) -> None:
    params = init_params(Variant.RECURRENT, 4, 3, seed=5, hidden=2)

    _, stats = fit(params, dataset[:1], epochs=20, learning_rate=1e-3)

    losses = stats.epoch_losses
    assert all(later < earlier for earlier, later in zip(losses, losses[1:]))


def test_targets_at_predictions_are_a_fixed_point(dataset: list[EpisodeSample]) -> None:
    params = init_params(Variant.REACTIVE, 4, 3, seed=1, hidden=2)
    inputs = dataset[2].inputs
    qs, _ = forward_sequence(params, inputs[:, None])
    sample = EpisodeSample(inputs, qs[:, 0], np.ones(qs[:, 0].shape, dtype=bool))

    fitted, stats = fit(params, [sample], epochs=3, learning_rate=0.01)

    assert stats.epoch_losses == [0.0, 0.0, 0.0]
    for name, tensor in params.tensors.items():
        np.testing.assert_array_equal(fitted.tensors[name], tensor)
