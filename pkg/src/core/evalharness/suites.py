"""Scenario suites and the path certificates used to tag them."""

import logging
import math
from enum import StrEnum, auto
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel
from scipy import sparse
from scipy.sparse import csgraph

from src.constants import SUITE_FORMAT
from src.core.config.config import EvalConfig, RolloutConfig, SimConfig
from src.core.models.geometry import GoalObject, wrap_angle
from src.core.models.perception import PerceptionParams
from src.core.models.scenario import GoalMode, GoalSpec, Scenario, Split
from src.core.policies.baselines import VGMPolicy
from src.core.rng import derive_seed
from src.core.rollouts.episode import run_episode
from src.core.rollouts.simulator import NavigationSimulator
from src.core.worldgen.environment import Environment
from src.core.worldgen.registry import EnvironmentRegistry
from src.core.worldgen.sampling import ScenarioSamplingError, goal_sighting, sample_scenario

logger = logging.getLogger(__name__)

SUITE_MAX_ATTEMPTS = 200
# Headings along a planned path look this far ahead.
_LOOKAHEAD = 0.5
# Visibility is checked at this spacing along a planned path.
_PATH_STRIDE = 0.25
# Extra clearance around the straight path of an open-field scenario, covering the
# weave of a policy that can only turn in whole action bins.
OPEN_FIELD_MARGIN = 0.2


class SuiteTag(StrEnum):
    STANDARD = auto()
    OCCLUSION_HEAVY = auto()
    OPEN_FIELD = auto()
    OBSTACLE_BETWEEN = auto()


class SuiteBuildError(Exception):
    def __init__(self, name: str, reason: str):
        super().__init__(f"Could not build suite '{name}': {reason}")


class EvalSuite(BaseModel):
    format: Literal["divis-suite/1"] = SUITE_FORMAT
    name: str
    split: Split
    tag: SuiteTag = SuiteTag.STANDARD
    goal_mode: GoalMode = GoalMode.GOAL_IMAGE
    seed: int = 0
    scenarios: list[Scenario] = []

    def __len__(self) -> int:
        return len(self.scenarios)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "EvalSuite":
        return cls.model_validate_json(Path(path).read_text())


def nearest_goal(env: Environment, position: np.ndarray, goal: GoalSpec) -> GoalObject:
    targets = env.goals_matching(goal)
    return min(targets, key=lambda g: math.dist(position, g.position) - g.radius)


def straight_path_clear(
    env: Environment, scenario: Scenario, sim: SimConfig = SimConfig(), margin: float = 0.0
) -> bool:
    """Whether the agent, widened by ``margin``, can drive straight at the goal until in reach."""
    start = scenario.start_pose.position
    target = nearest_goal(env, start, scenario.goal)
    centre = np.asarray(target.position)
    offset = centre - start
    distance = float(np.hypot(*offset))
    stop_at = target.radius + 0.5 * sim.rewards.success_distance
    if distance <= stop_at:
        return True
    end = start + offset * (1.0 - stop_at / distance)
    geometry = env.geometry(env.excluded_ids(scenario.goal))
    return geometry.sweep(start, end, sim.rewards.agent_radius + margin) is None


class PathCertifier:
    """Shortest collision-free paths on an environment's free-space raster."""

    def __init__(self, env: Environment, agent_radius: float):
        self.env = env
        free_space = env.free_space
        self.resolution = free_space.resolution
        self.origin = np.asarray(free_space.origin)
        self.free = free_space.main & (free_space.clearance > agent_radius)
        self.graph = self._build_graph()

    def _build_graph(self) -> sparse.csr_matrix:
        ny, nx = self.free.shape
        index = np.arange(ny * nx).reshape(ny, nx)
        rows, cols, weights = [], [], []
        for dy, dx in ((0, 1), (1, 0), (1, 1), (1, -1)):
            src = (slice(0, ny - dy), slice(max(0, -dx), nx - max(0, dx)))
            dst = (slice(dy, ny), slice(max(0, dx), nx + min(0, dx)))
            both = self.free[src] & self.free[dst]
            rows.append(index[src][both])
            cols.append(index[dst][both])
            weights.append(np.full(int(both.sum()), math.hypot(dx, dy) * self.resolution))
        return sparse.csr_matrix(
            (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
            shape=(ny * nx, ny * nx),
        )

    def _centre(self, flat: int) -> np.ndarray:
        row, col = divmod(int(flat), self.free.shape[1])
        return self.origin + (np.array([col, row]) + 0.5) * self.resolution

    def shortest_path(self, start: np.ndarray, target: GoalObject, reach: float) -> np.ndarray | None:
        """Cell-centre waypoints from ``start`` to within ``reach`` of the target's surface."""
        ny, nx = self.free.shape
        row = int((start[1] - self.origin[1]) // self.resolution)
        col = int((start[0] - self.origin[0]) // self.resolution)
        if not (0 <= row < ny and 0 <= col < nx and self.free[row, col]):
            return None
        source = row * nx + col
        dist, pred = csgraph.dijkstra(
            self.graph, directed=False, indices=source, return_predecessors=True
        )
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.resolution
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.resolution
        gx, gy = np.meshgrid(xs, ys)
        surface = np.hypot(gx - target.position[0], gy - target.position[1]) - target.radius
        goal_cells = np.flatnonzero((surface < reach) & self.free)
        goal_cells = goal_cells[np.isfinite(dist[goal_cells])]
        if goal_cells.size == 0:
            return None
        node = int(goal_cells[np.argmin(dist[goal_cells])])
        path = [node]
        while node != source:
            node = int(pred[node])
            path.append(node)
        return np.array([self._centre(n) for n in reversed(path)])

    def goal_leaves_view(self, path: np.ndarray, target: GoalObject, sim: SimConfig) -> bool:
        """Whether an agent facing along ``path`` loses sight of the target at some point."""
        grid = sim.grid
        steps = np.hypot(*np.diff(path, axis=0).T)
        travelled = np.concatenate([[0.0], np.cumsum(steps)])
        total = travelled[-1]
        for s in np.arange(0.0, max(total - _LOOKAHEAD, 0.0), _PATH_STRIDE):
            here = path[np.searchsorted(travelled, s)]
            ahead = path[min(np.searchsorted(travelled, s + _LOOKAHEAD), len(path) - 1)]
            heading = math.atan2(ahead[1] - here[1], ahead[0] - here[0])
            seen = goal_sighting(self.env, float(here[0]), float(here[1]), target, grid.sight_range)
            if seen is None or not grid.in_view(wrap_angle(seen[0] - heading)):
                return True
        return False


class SuiteBuilder:
    """Samples scenarios and keeps those that pass a suite tag's certificate.

    Open-field certification runs noiseless VGM with ``rollout``'s horizon, so
    a suite built here is solved by VGM whenever perception is exact.
    """

    def __init__(self, sim: SimConfig = SimConfig(), rollout: RolloutConfig = RolloutConfig()):
        self.sim = sim
        self.rollout = rollout
        self._certifiers: dict[str, PathCertifier] = {}

    def _certifier(self, env: Environment) -> PathCertifier:
        if env.id not in self._certifiers:
            self._certifiers[env.id] = PathCertifier(env, self.sim.rewards.agent_radius)
        return self._certifiers[env.id]

    def vgm_reaches_goal(self, env: Environment, scenario: Scenario) -> bool:
        sim = NavigationSimulator(env, scenario, self.sim, PerceptionParams())
        policy = VGMPolicy(self.sim.actions, self.sim.grid)
        greedy = self.rollout.model_copy(update={"exploration_epsilon": 0.0})
        return run_episode(sim, policy, greedy, keep_observations=False).success

    def certify(self, env: Environment, scenario: Scenario, tag: SuiteTag) -> bool:
        if tag == SuiteTag.STANDARD:
            return True
        clear = straight_path_clear(env, scenario, self.sim)
        if tag == SuiteTag.OPEN_FIELD:
            return (
                clear
                and straight_path_clear(env, scenario, self.sim, OPEN_FIELD_MARGIN)
                and self.vgm_reaches_goal(env, scenario)
            )
        if tag == SuiteTag.OBSTACLE_BETWEEN:
            return not clear
        if clear:
            return False
        certifier = self._certifier(env)
        start = scenario.start_pose.position
        target = nearest_goal(env, start, scenario.goal)
        path = certifier.shortest_path(start, target, self.sim.rewards.success_distance)
        return path is not None and certifier.goal_leaves_view(path, target, self.sim)

    def _sample_certified(
        self,
        name: str,
        env: Environment,
        index: int,
        split: Split,
        seed: int,
        tag: SuiteTag,
        goal_mode: GoalMode,
        max_attempts: int,
    ) -> Scenario | None:
        for attempt in range(max_attempts):
            scenario_seed = derive_seed(seed, "suite", name, index, env.id, attempt, bits=64)
            try:
                scenario = sample_scenario(
                    env,
                    goal_mode,
                    scenario_seed,
                    grid=self.sim.grid,
                    agent_radius=self.sim.rewards.agent_radius,
                    split=split,
                )
            except ScenarioSamplingError:
                continue
            if self.certify(env, scenario, tag):
                return scenario
        return None

    def build(
        self,
        name: str,
        environments: list[Environment],
        split: Split,
        size: int,
        seed: int,
        tag: SuiteTag = SuiteTag.STANDARD,
        goal_mode: GoalMode = GoalMode.GOAL_IMAGE,
        max_attempts: int = SUITE_MAX_ATTEMPTS,
    ) -> EvalSuite:
        """Sample ``size`` scenarios round-robin over ``environments`` that pass ``tag``.

        An environment that yields no certified scenario within ``max_attempts``
        is dropped for the rest of the build and its turn passes to the next one.
        """
        if not environments:
            raise SuiteBuildError(name, "no environments")
        barren: set[str] = set()
        scenarios: list[Scenario] = []
        for i in range(size):
            scenario = None
            for offset in range(len(environments)):
                env = environments[(i + offset) % len(environments)]
                if env.id in barren:
                    continue
                scenario = self._sample_certified(
                    name, env, i, split, seed, tag, goal_mode, max_attempts
                )
                if scenario is not None:
                    break
                logger.warning(
                    "suite %s: no %s scenario in '%s' after %d attempts, skipping it",
                    name,
                    tag,
                    env.id,
                    max_attempts,
                )
                barren.add(env.id)
            if scenario is None:
                raise SuiteBuildError(
                    name, f"no environment yields a {tag} scenario in {max_attempts} attempts"
                )
            scenarios.append(scenario)
        logger.info("built suite %s: %d %s scenarios", name, len(scenarios), tag)
        return EvalSuite(
            name=name, split=split, tag=tag, goal_mode=goal_mode, seed=seed, scenarios=scenarios
        )


class UnknownSuiteError(Exception):
    def __init__(self, name: str):
        known = ", ".join(STANDARD_SUITES)
        super().__init__(f"Unknown suite '{name}' (known: {known}).")


# name -> (environment split, tag)
STANDARD_SUITES: dict[str, tuple[Split, SuiteTag]] = {
    "seen": (Split.SEEN, SuiteTag.STANDARD),
    "unseen": (Split.UNSEEN, SuiteTag.STANDARD),
    "occlusion_heavy": (Split.SEEN, SuiteTag.OCCLUSION_HEAVY),
    "open_field": (Split.SEEN, SuiteTag.OPEN_FIELD),
    "obstacle_between": (Split.SEEN, SuiteTag.OBSTACLE_BETWEEN),
}


def standard_suite(name: str, config: EvalConfig, registry: EnvironmentRegistry) -> EvalSuite:
    """Build one of the named benchmark suites from ``config``'s sizes and seed."""
    if name not in STANDARD_SUITES:
        raise UnknownSuiteError(name)
    split, tag = STANDARD_SUITES[name]
    size = {
        "seen": config.seen_size,
        "unseen": config.unseen_size,
        "occlusion_heavy": config.occlusion_heavy_size,
    }.get(name, config.fixture_suite_size)
    return SuiteBuilder(config.sim, config.rollout).build(
        name,
        registry.split(split),
        split,
        size,
        seed=derive_seed(config.seed, "standard-suite", name),
        tag=tag,
        goal_mode=config.goal_mode,
    )
