from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Generic, TypeVar

from src.core.config.config import SimConfig
from src.core.dynamics.step import goal_distance, step
from src.core.models.dynamics import Terminal
from src.core.models.geometry import Pose
from src.core.models.perception import ObservationStack, PerceptionParams
from src.core.models.scenario import Scenario
from src.core.perception.observe import Frame, render_frame, stack_frames
from src.core.worldgen.environment import Environment

S = TypeVar("S")


class InvalidScenarioError(Exception):
    def __init__(self, scenario: Scenario, reason: str):
        super().__init__(f"Scenario '{scenario.id}' is invalid: {reason}")


@dataclass(frozen=True)
class Transition(Generic[S]):
    state: S
    reward: float
    terminal: Terminal = Terminal.NONE
    success: bool = False
    reward_parts: tuple[float, float] | None = None

    @property
    def ends_episode(self) -> bool:
        return self.terminal != Terminal.NONE or self.success


class BaseSimulator(ABC, Generic[S]):
    num_actions: int
    scenario: Scenario | None = None

    @abstractmethod
    def reset(self) -> S:
        """
        Return the state an episode starts in.

        States are immutable values: `step` returns a new state and never
        modifies the one it was given, so any state can be stepped again to
        fork an alternative continuation.
        """
        ...

    @abstractmethod
    def step(self, state: S, action: int) -> Transition[S]:
        """
        Apply `action` in `state`.

        This method must:
          - Be deterministic in (state, action).
          - Report `terminal` for collisions and STOP, and `success` when the
            goal criterion holds after the move.
          - Leave `state` untouched.
        """
        ...

    @abstractmethod
    def observe(self, state: S) -> ObservationStack:
        ...

    def start_success(self, state: S) -> bool:
        return False

    def pose(self, state: S) -> Pose | None:
        return None


@dataclass(frozen=True)
class NavState:
    pose: Pose
    prev_pose: Pose
    step: int
    frame: Frame | None
    prev_frame: Frame | None


class NavigationSimulator(BaseSimulator[NavState]):
    """An environment and scenario stepped through dynamics and perception.

    Each state carries its rendered frame so observations are built once
    per visited pose; terminal states are not rendered.
    """

    def __init__(
        self,
        env: Environment,
        scenario: Scenario,
        sim: SimConfig = SimConfig(),
        perception: PerceptionParams = PerceptionParams(),
    ):
        if scenario.env_id != env.id:
            raise InvalidScenarioError(scenario, f"belongs to '{scenario.env_id}', not '{env.id}'")
        if not env.goals_matching(scenario.goal):
            raise InvalidScenarioError(scenario, "no goal object matches")
        self.env = env
        self.scenario = scenario
        self.sim = sim
        self.perception = perception
        self.num_actions = sim.actions.k
        self.d_init = goal_distance(env, scenario.start_pose.position, scenario.goal)

    def _frame(self, pose: Pose, step_index: int) -> Frame:
        return render_frame(
            self.env,
            pose,
            self.scenario.goal,
            self.sim.grid,
            self.perception,
            self.scenario.seed,
            step_index,
        )

    def reset(self) -> NavState:
        pose = self.scenario.start_pose
        frame = self._frame(pose, 0)
        return NavState(pose=pose, prev_pose=pose, step=0, frame=frame, prev_frame=frame)

    def start_success(self, state: NavState) -> bool:
        return self.d_init < self.sim.rewards.success_distance

    def pose(self, state: NavState) -> Pose:
        return state.pose

    def step(self, state: NavState, action: int) -> Transition[NavState]:
        outcome = step(
            self.env,
            state.pose,
            action,
            self.scenario.goal,
            self.d_init,
            self.sim.actions,
            self.sim.rewards,
        )
        ends = outcome.terminal != Terminal.NONE or outcome.success
        next_index = state.step + 1
        new_state = NavState(
            pose=outcome.new_pose,
            prev_pose=state.pose,
            step=next_index,
            frame=None if ends else self._frame(outcome.new_pose, next_index),
            prev_frame=state.frame,
        )
        return Transition(
            state=new_state,
            reward=outcome.reward,
            terminal=outcome.terminal,
            success=outcome.success,
            reward_parts=outcome.reward_parts,
        )

    def observe(self, state: NavState) -> ObservationStack:
        current = state.frame if state.frame is not None else self._frame(state.pose, state.step)
        previous = state.prev_frame if state.prev_frame is not None else current
        return stack_frames(current, previous, state.pose, state.prev_pose, self.sim.grid)
