import logging
from collections.abc import Iterable
from dataclasses import dataclass

from pydantic import BaseModel, computed_field

from src.core.config.config import EvalConfig
from src.core.evalharness.suites import EvalSuite
from src.core.models.dynamics import Terminal
from src.core.models.scenario import Scenario, Split
from src.core.policies.base_policy import BasePolicy
from src.core.rng import derive_seed
from src.core.rollouts.episode import Trajectory, run_episode
from src.core.rollouts.simulator import NavigationSimulator
from src.core.singletons import ENV_REGISTRY
from src.core.worker_pool import INLINE, WorkerPool
from src.core.worldgen.environment import Environment
from src.core.worldgen.randomization import randomize_perception
from src.core.worldgen.registry import EnvironmentRegistry

logger = logging.getLogger(__name__)


class ScenarioOutcome(BaseModel):
    scenario_id: str
    trial: int
    success: bool
    terminal: Terminal
    steps: int


class Metrics(BaseModel):
    """Outcome counts; rates are derived so merged metrics stay exact."""

    suite: str = ""
    policy: str = ""
    total: int = 0
    successes: int = 0
    collisions: int = 0
    steps: int = 0
    outcomes: list[ScenarioOutcome] = []

    @computed_field
    @property
    def success_rate(self) -> float:
        return 100.0 * self.successes / self.total if self.total else 0.0

    @computed_field
    @property
    def collision_rate(self) -> float:
        return 100.0 * self.collisions / self.total if self.total else 0.0

    @computed_field
    @property
    def mean_length(self) -> float:
        return self.steps / self.total if self.total else 0.0

    @classmethod
    def from_outcomes(
        cls, outcomes: Iterable[ScenarioOutcome], suite: str = "", policy: str = ""
    ) -> "Metrics":
        outcomes = list(outcomes)
        return cls(
            suite=suite,
            policy=policy,
            total=len(outcomes),
            successes=sum(o.success for o in outcomes),
            collisions=sum(o.terminal == Terminal.COLLISION for o in outcomes),
            steps=sum(o.steps for o in outcomes),
            outcomes=outcomes,
        )

    def merge(self, other: "Metrics", suite: str | None = None) -> "Metrics":
        return Metrics.from_outcomes(
            [*self.outcomes, *other.outcomes],
            suite=suite if suite is not None else self.suite,
            policy=self.policy,
        )


@dataclass(frozen=True)
class _TrialJob:
    env: Environment
    scenario: Scenario
    policy: BasePolicy
    config: EvalConfig
    split: Split
    trial: int


def trial_seed(config: EvalConfig, scenario: Scenario, trial: int) -> int:
    """Per-trial seed keyed by scenario id, so results ignore suite order."""
    return derive_seed(config.seed, "eval", scenario.id, trial)


def run_trial(job: _TrialJob) -> Trajectory:
    seed = trial_seed(job.config, job.scenario, job.trial)
    perception = randomize_perception(
        job.config.base_perception, seed, job.config.randomization, job.split
    )
    sim = NavigationSimulator(job.env, job.scenario, job.config.sim, perception)
    return run_episode(sim, job.policy, job.config.rollout, seed, keep_observations=False)


def _outcome(job: _TrialJob, trajectory: Trajectory) -> ScenarioOutcome:
    return ScenarioOutcome(
        scenario_id=job.scenario.id,
        trial=job.trial,
        success=trajectory.success,
        terminal=trajectory.terminal,
        steps=len(trajectory),
    )


def evaluate(
    policy: BasePolicy,
    suite: EvalSuite,
    config: EvalConfig = EvalConfig(),
    registry: EnvironmentRegistry | None = None,
    pool: WorkerPool = INLINE,
) -> Metrics:
    """Run every scenario of ``suite`` ``config.trials_per_scenario`` times.

    Each trial draws fresh randomized perception from its own seed.
    """
    registry = registry if registry is not None else ENV_REGISTRY
    jobs = [
        _TrialJob(
            env=registry.get_environment(scenario.env_id),
            scenario=scenario,
            policy=policy,
            config=config,
            split=suite.split,
            trial=trial,
        )
        for scenario in suite.scenarios
        for trial in range(config.trials_per_scenario)
    ]
    trajectories = pool.map(run_trial, jobs)
    metrics = Metrics.from_outcomes(
        (_outcome(job, t) for job, t in zip(jobs, trajectories)),
        suite=suite.name,
        policy=policy.name,
    )
    logger.info(
        "%s on %s: success %.1f%%, collision %.1f%% over %d trials",
        metrics.policy,
        metrics.suite,
        metrics.success_rate,
        metrics.collision_rate,
        metrics.total,
    )
    return metrics
