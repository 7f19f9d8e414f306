import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

from src.core.config.config import RolloutConfig
from src.core.models.dynamics import Terminal
from src.core.models.geometry import Pose
from src.core.models.perception import ObservationStack
from src.core.models.scenario import Scenario
from src.core.policies.base_policy import BasePolicy, PolicyState
from src.core.rng import derive_rng
from src.core.rollouts.simulator import BaseSimulator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrajectoryStep:
    pose: Pose | None
    observation: ObservationStack | None
    action: int
    reward: float
    reward_parts: tuple[float, float] | None = None


@dataclass(frozen=True)
class Trajectory:
    steps: list[TrajectoryStep]
    terminal: Terminal
    success: bool
    scenario: Scenario | None = None
    final_pose: Pose | None = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def rewards(self) -> list[float]:
        return [s.reward for s in self.steps]

    @property
    def actions(self) -> list[int]:
        return [s.action for s in self.steps]

    @property
    def poses(self) -> list[Pose]:
        """Visited poses including the final one."""
        poses = [s.pose for s in self.steps if s.pose is not None]
        if self.final_pose is not None:
            poses.append(self.final_pose)
        return poses


@dataclass
class EpisodeRecord:
    """A trajectory plus the simulator and policy states needed to fork from it."""

    trajectory: Trajectory
    states: list[Any] = field(default_factory=list)
    memories: list[PolicyState] = field(default_factory=list)


def mc_return(rewards: Sequence[float], gamma: float) -> float:
    """Discounted sum of ``rewards``."""
    total = 0.0
    for reward in reversed(rewards):
        total = reward + gamma * total
    return total


def held_rewards(
    rewards: Sequence[float], reached: bool, horizon: int, hold_goal: bool
) -> list[float]:
    """Rewards with the goal-reaching step repeated up to ``horizon``."""
    rewards = list(rewards)
    if hold_goal and reached and rewards and len(rewards) < horizon:
        rewards.extend([rewards[-1]] * (horizon - len(rewards)))
    return rewards


def episode_return(
    rewards: Sequence[float], reached: bool, horizon: int, config: RolloutConfig
) -> float:
    return mc_return(held_rewards(rewards, reached, horizon, config.hold_goal), config.gamma)


def _end_terminal(terminal: Terminal, success: bool) -> Terminal:
    if success and terminal == Terminal.NONE:
        return Terminal.REACHED
    return terminal


def record_episode(
    sim: BaseSimulator,
    policy: BasePolicy,
    config: RolloutConfig,
    seed: int,
    keep_observations: bool = True,
) -> EpisodeRecord:
    rng = derive_rng(seed, "episode")
    state = sim.reset()
    if sim.start_success(state):
        trajectory = Trajectory([], Terminal.REACHED, True, sim.scenario, sim.pose(state))
        return EpisodeRecord(trajectory)

    memory = policy.initial_state()
    states: list[Any] = []
    memories: list[PolicyState] = []
    steps: list[TrajectoryStep] = []
    terminal, success = Terminal.MAX_STEPS, False
    for _ in range(config.max_steps):
        observation = sim.observe(state)
        action, memory = policy.act(observation, memory, rng, config.exploration_epsilon)
        transition = sim.step(state, action)
        states.append(state)
        memories.append(memory)
        steps.append(
            TrajectoryStep(
                pose=sim.pose(state),
                observation=observation if keep_observations else None,
                action=action,
                reward=transition.reward,
                reward_parts=transition.reward_parts,
            )
        )
        state = transition.state
        if transition.ends_episode:
            terminal = _end_terminal(transition.terminal, transition.success)
            success = transition.success
            break

    trajectory = Trajectory(steps, terminal, success, sim.scenario, sim.pose(state))
    return EpisodeRecord(trajectory, states, memories)


def run_episode(
    sim: BaseSimulator,
    policy: BasePolicy,
    config: RolloutConfig = RolloutConfig(),
    seed: int = 0,
    keep_observations: bool = True,
) -> Trajectory:
    """Roll ``policy`` out until collision, STOP, success or ``config.max_steps``."""
    trajectory = record_episode(sim, policy, config, seed, keep_observations).trajectory
    logger.debug(
        "episode seed=%d: %d steps, terminal=%s, success=%s",
        seed,
        len(trajectory),
        trajectory.terminal,
        trajectory.success,
    )
    return trajectory
