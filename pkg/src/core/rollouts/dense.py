import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.core.config.config import RolloutConfig
from src.core.policies.base_policy import BasePolicy, PolicyState
from src.core.rng import derive_rng
from src.core.rollouts.episode import Trajectory, episode_return, record_episode
from src.core.rollouts.simulator import BaseSimulator
from src.core.worker_pool import INLINE, WorkerPool

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DenseTrajectory:
    """An on-policy trajectory with a Monte Carlo return for every action at every step.

    ``q_mask[t, a]`` is False where no return was computed for action ``a``.
    """

    base: Trajectory
    q_targets: np.ndarray  # (len(base), K)
    q_mask: np.ndarray  # (len(base), K) bool

    def __len__(self) -> int:
        return len(self.base)


@dataclass(frozen=True)
class BranchResult:
    rewards: list[float]
    reached: bool


@dataclass(frozen=True)
class _BranchJob:
    sim: BaseSimulator
    policy: BasePolicy
    state: Any
    memory: PolicyState
    t: int
    actions: tuple[int, ...]
    horizon: int
    seed: int


def run_branch(
    sim: BaseSimulator,
    policy: BasePolicy,
    state: Any,
    memory: PolicyState,
    action: int,
    horizon: int,
    rng: np.random.Generator,
) -> BranchResult:
    """Force ``action`` from ``state``, then follow the greedy policy for up to ``horizon`` steps."""
    transition = sim.step(state, action)
    rewards = [transition.reward]
    while not transition.ends_episode and len(rewards) < horizon:
        observation = sim.observe(transition.state)
        next_action, memory = policy.act(observation, memory, rng, 0.0)
        transition = sim.step(transition.state, next_action)
        rewards.append(transition.reward)
    return BranchResult(rewards, transition.success)


def _run_branch_job(job: _BranchJob) -> list[BranchResult]:
    return [
        run_branch(
            job.sim,
            job.policy,
            job.state,
            job.memory,
            action,
            job.horizon,
            derive_rng(job.seed, "branch", job.t, action),
        )
        for action in job.actions
    ]


def dense_rollout(
    sim: BaseSimulator,
    policy: BasePolicy,
    config: RolloutConfig = RolloutConfig(),
    seed: int = 0,
    pool: WorkerPool = INLINE,
    keep_observations: bool = True,
) -> DenseTrajectory:
    """Run one episode and fork a branch for every action not taken at every step.

    Branches start from the simulator state and policy memory of step t and
    last at most the remaining horizon ``max_steps - t``.
    """
    record = record_episode(sim, policy, config, seed, keep_observations)
    base = record.trajectory
    k = sim.num_actions
    steps = len(base)
    q_targets = np.zeros((steps, k), dtype=np.float64)
    q_mask = np.zeros((steps, k), dtype=bool)

    rewards = base.rewards
    for t, taken in enumerate(base.actions):
        horizon = config.max_steps - t
        q_targets[t, taken] = episode_return(rewards[t:], base.success, horizon, config)
        q_mask[t, taken] = True

    if config.branch_all_states and steps:
        jobs = [
            _BranchJob(
                sim=sim,
                policy=policy,
                state=record.states[t],
                memory=record.memories[t],
                t=t,
                actions=tuple(a for a in range(k) if a != taken),
                horizon=config.max_steps - t,
                seed=seed,
            )
            for t, taken in enumerate(base.actions)
        ]
        for job, results in zip(jobs, pool.map(_run_branch_job, jobs)):
            for action, branch in zip(job.actions, results):
                q_targets[job.t, action] = episode_return(
                    branch.rewards, branch.reached, job.horizon, config
                )
                q_mask[job.t, action] = True

    logger.debug("dense rollout seed=%d: %d steps, %d targets", seed, steps, int(q_mask.sum()))
    return DenseTrajectory(base, q_targets, q_mask)
