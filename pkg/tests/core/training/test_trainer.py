from pathlib import Path

import pytest

from src.core.config.config import RolloutConfig, TrainConfig
from src.core.models.geometry import Pose
from src.core.models.scenario import GoalSpec, Scenario
from src.core.qnet.checkpoint import load_checkpoint
from src.core.qnet.params import Variant
from src.core.training.trainer import REPORT_FILE, greedy_success_rate, train
from src.core.worker_pool import WorkerPool
from src.core.worldgen.environment import Environment


@pytest.fixture
def config() -> TrainConfig:
    """A training run small enough for unit tests"""
    return TrainConfig(
        variant=Variant.RECURRENT_FLOW,
        batches=2,
        episodes_per_batch=1,
        epochs_per_fit=1,
        minibatch_episodes=0,
        seed=3,
        validation_episodes=2,
        rollout=RolloutConfig(max_steps=3),
    )


def test_train_writes_checkpoints_and_report(
    tmp_path: Path, empty_env: Environment, config: TrainConfig
) -> None:
    report = train([empty_env], config, tmp_path)

    assert [b.batch for b in report.batches] == [0, 1]
    assert (tmp_path / "ckpt_0000.bin").exists()
    assert (tmp_path / "ckpt_0001.bin").exists()
    assert len((tmp_path / REPORT_FILE).read_text().splitlines()) == 2
    params, metadata = load_checkpoint(tmp_path / "ckpt_0001.bin")
    assert params.variant == Variant.RECURRENT_FLOW
    assert metadata["batch"] == 1


def test_train_resumes_after_last_checkpoint(
    tmp_path: Path, empty_env: Environment, config: TrainConfig
) -> None:
    train([empty_env], config, tmp_path)

    longer = config.model_copy(update={"batches": 3})
    report = train([empty_env], longer, tmp_path)

    assert [b.batch for b in report.batches] == [0, 1, 2]
    assert len(list(tmp_path.glob("ckpt_*.bin"))) == 3


def test_train_is_reproducible(tmp_path: Path, empty_env: Environment, config: TrainConfig) -> None:
    single = config.model_copy(update={"batches": 1})

    train([empty_env], single, tmp_path / "a")
    train([empty_env], single, tmp_path / "b")

    first = (tmp_path / "a" / "ckpt_0000.bin").read_bytes()
    assert first == (tmp_path / "b" / "ckpt_0000.bin").read_bytes()


def test_train_needs_environments(tmp_path: Path, config: TrainConfig) -> None:
    with pytest.raises(ValueError):
        train([], config, tmp_path)


def test_checkpoint_rate_is_reproducible(
    tmp_path: Path, empty_env: Environment, config: TrainConfig
) -> None:
    """Test re-running a saved checkpoint greedily gives its recorded success rate"""
    report = train([empty_env], config, tmp_path)

    params, metadata = load_checkpoint(tmp_path / "ckpt_0001.bin")
    rate = greedy_success_rate(params, [empty_env], config, metadata["batch"])

    assert rate == metadata["success_rate"]
    assert rate == report.batches[1].greedy_success_rate
    assert metadata["validation_episodes"] == 2
    assert metadata["environments"] == ["empty_room"]


def test_train_on_worker_pool(tmp_path: Path, empty_env: Environment, config: TrainConfig) -> None:
    single = config.model_copy(update={"batches": 1})

    with WorkerPool(workers=2) as pool:
        report = train([empty_env], single, tmp_path / "pooled", pool)
    inline = train([empty_env], single, tmp_path / "inline")

    assert report.batches[0].steps == inline.batches[0].steps
    pooled_bytes = (tmp_path / "pooled" / "ckpt_0000.bin").read_bytes()
    assert pooled_bytes == (tmp_path / "inline" / "ckpt_0000.bin").read_bytes()


def test_episodes_starting_at_goal_are_skipped(
    tmp_path: Path,
    empty_env: Environment,
    config: TrainConfig,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    at_goal = Scenario(
        env_id="empty_room",
        start_pose=Pose(x=6.55, y=5.0, heading=0.0),
        goal=GoalSpec.for_instance("empty_room/ball"),
        seed=0,
    )
    monkeypatch.setattr(
        "src.core.training.trainer.sample_scenario", lambda *args, **kwargs: at_goal
    )

    report = train([empty_env], config.model_copy(update={"batches": 1}), tmp_path)

    (batch,) = report.batches
    assert batch.steps == 0
    assert batch.buffer_steps == 0
    assert batch.success_rate == 100.0
    assert batch.greedy_success_rate == 100.0
