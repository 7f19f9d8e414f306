import logging
from dataclasses import dataclass
from pathlib import Path

from pydantic import BaseModel

from src.core.config.config import TrainConfig
from src.core.models.dynamics import Terminal
from src.core.models.scenario import Split
from src.core.policies.q_policy import QPolicy
from src.core.qnet.checkpoint import load_checkpoint, save_checkpoint
from src.core.qnet.optimizer import Adam
from src.core.qnet.params import QPolicyParams, init_params
from src.core.rng import derive_seed
from src.core.rollouts.dense import DenseTrajectory, dense_rollout
from src.core.rollouts.episode import Trajectory, run_episode
from src.core.rollouts.simulator import NavigationSimulator
from src.core.training.buffer import EpisodeBuffer, to_sample
from src.core.training.fit import fit
from src.core.worker_pool import INLINE, WorkerPool
from src.core.worldgen.environment import Environment
from src.core.worldgen.randomization import randomize_perception
from src.core.worldgen.sampling import sample_scenario

logger = logging.getLogger(__name__)

REPORT_FILE = "train_report.jsonl"


class BatchReport(BaseModel):
    batch: int
    epsilon: float
    episodes: int
    steps: int
    buffer_steps: int
    loss_initial: float
    loss_final: float
    success_rate: float
    collision_rate: float
    greedy_success_rate: float
    checkpoint: str


class TrainReport(BaseModel):
    batches: list[BatchReport] = []

    @property
    def final(self) -> BatchReport | None:
        return self.batches[-1] if self.batches else None


def checkpoint_name(batch: int) -> str:
    return f"ckpt_{batch:04d}.bin"


@dataclass(frozen=True)
class _CollectJob:
    env: Environment
    params: QPolicyParams
    config: TrainConfig
    batch: int
    episode: int


def _training_sim(
    env: Environment, config: TrainConfig, scenario_seed: int
) -> NavigationSimulator:
    scenario = sample_scenario(
        env,
        config.goal_mode,
        scenario_seed,
        grid=config.sim.grid,
        agent_radius=config.sim.rewards.agent_radius,
        split=Split.SEEN,
    )
    perception = randomize_perception(
        config.base_perception, scenario_seed, config.randomization, Split.SEEN
    )
    return NavigationSimulator(env, scenario, config.sim, perception)


def collect_episode(job: _CollectJob) -> DenseTrajectory:
    """Sample a scenario, randomize perception and run one dense rollout."""
    config = job.config
    scenario_seed = derive_seed(config.seed, "train-scenario", job.batch, job.episode, bits=64)
    sim = _training_sim(job.env, config, scenario_seed)
    policy = QPolicy(job.params, config.sim.actions, config.sim.grid)
    rollout = config.rollout.model_copy(update={"exploration_epsilon": config.epsilon(job.batch)})
    episode_seed = derive_seed(config.seed, "train-episode", job.batch, job.episode)
    return dense_rollout(sim, policy, rollout, episode_seed)


def validate_episode(job: _CollectJob) -> Trajectory:
    """Greedy rollout of ``job.params`` on a held-back scenario of ``job.batch``."""
    config = job.config
    scenario_seed = derive_seed(config.seed, "train-validate", job.batch, job.episode, bits=64)
    sim = _training_sim(job.env, config, scenario_seed)
    policy = QPolicy(job.params, config.sim.actions, config.sim.grid)
    greedy = config.rollout.model_copy(update={"exploration_epsilon": 0.0})
    return run_episode(sim, policy, greedy, scenario_seed, keep_observations=False)


def greedy_success_rate(
    params: QPolicyParams,
    environments: list[Environment],
    config: TrainConfig,
    batch: int,
    pool: WorkerPool = INLINE,
) -> float:
    """Success rate of ``params`` on the validation scenarios of ``batch``.

    This is the rate stored in each checkpoint; it depends only on the saved
    parameters, the config and the batch index.
    """
    jobs = [
        _CollectJob(
            env=environments[e % len(environments)],
            params=params,
            config=config,
            batch=batch,
            episode=e,
        )
        for e in range(config.validation_episodes)
    ]
    trajectories = pool.map(validate_episode, jobs)
    return 100.0 * sum(t.success for t in trajectories) / len(trajectories)


def _resume(out_dir: Path) -> tuple[int, QPolicyParams | None, list[BatchReport]]:
    checkpoints = sorted(out_dir.glob("ckpt_*.bin"))
    if not checkpoints:
        return 0, None, []
    params, metadata = load_checkpoint(checkpoints[-1])
    done = int(metadata.get("batch", -1)) + 1
    reports = []
    report_path = out_dir / REPORT_FILE
    if report_path.exists():
        for line in report_path.read_text().splitlines():
            if line.strip():
                record = BatchReport.model_validate_json(line)
                if record.batch < done:
                    reports.append(record)
    logger.info("resuming from %s at batch %d", checkpoints[-1].name, done)
    return done, params, reports


def train(
    environments: list[Environment],
    config: TrainConfig,
    out_dir: str | Path,
    pool: WorkerPool = INLINE,
) -> TrainReport:
    """Batch RL: collect dense rollouts, refit the Q-network, checkpoint, repeat.

    Episodes are assigned to environments round-robin so every batch draws
    from all of them. A run restarted in the same directory continues after
    the last checkpoint; the replay buffer and optimizer moments start empty.
    """
    if not environments:
        raise ValueError("training needs at least one environment")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start, params, reports = _resume(out_dir)
    if params is None:
        params = init_params(config.variant, config.sim.grid.n, config.sim.actions.k, config.seed)
    buffer = EpisodeBuffer(config.buffer_capacity)
    optimizer = Adam(config.learning_rate)

    for batch in range(start, config.batches):
        jobs = [
            _CollectJob(
                env=environments[(batch * config.episodes_per_batch + e) % len(environments)],
                params=params,
                config=config,
                batch=batch,
                episode=e,
            )
            for e in range(config.episodes_per_batch)
        ]
        rollouts = pool.map(collect_episode, jobs)
        for dense in rollouts:
            # Episodes that start inside the success radius have no steps to learn from.
            if len(dense):
                buffer.add(to_sample(dense, config.variant))

        loss_initial = loss_final = 0.0
        if len(buffer) and config.epochs_per_fit:
            params, stats = fit(
                params,
                buffer.episodes(),
                config.epochs_per_fit,
                config.learning_rate,
                config.minibatch_episodes,
                seed=derive_seed(config.seed, "fit", batch),
                optimizer=optimizer,
            )
            loss_initial, loss_final = stats.initial_loss, stats.final_loss

        episodes = len(rollouts)
        report = BatchReport(
            batch=batch,
            epsilon=config.epsilon(batch),
            episodes=episodes,
            steps=sum(len(d) for d in rollouts),
            buffer_steps=buffer.steps,
            loss_initial=loss_initial,
            loss_final=loss_final,
            success_rate=100.0 * sum(d.base.success for d in rollouts) / episodes,
            collision_rate=100.0
            * sum(d.base.terminal == Terminal.COLLISION for d in rollouts)
            / episodes,
            greedy_success_rate=greedy_success_rate(params, environments, config, batch, pool),
            checkpoint=checkpoint_name(batch),
        )
        save_checkpoint(
            out_dir / report.checkpoint,
            params,
            {
                "batch": batch,
                "seed": config.seed,
                "success_rate": report.greedy_success_rate,
                "validation_episodes": config.validation_episodes,
                "environments": [env.id for env in environments],
            },
        )
        reports.append(report)
        _write_reports(out_dir / REPORT_FILE, reports)
        logger.info(
            "batch %d: loss %.4f -> %.4f, success %.1f%% (greedy %.1f%%), collision %.1f%%, "
            "epsilon %.3f",
            batch,
            loss_initial,
            loss_final,
            report.success_rate,
            report.greedy_success_rate,
            report.collision_rate,
            report.epsilon,
        )
    return TrainReport(batches=reports)


def _write_reports(path: Path, reports: list[BatchReport]) -> None:
    with open(path, "w") as f:
        for report in reports:
            f.write(report.model_dump_json() + "\n")
