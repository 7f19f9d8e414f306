import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from src.core.config.config import RolloutConfig, SimConfig
from src.core.evalharness.render import RenderError, render_trajectory, svg_document
from src.core.models.dynamics import ActionSpace, Terminal
from src.core.models.geometry import Pose
from src.core.models.scenario import GoalSpec, Scenario
from src.core.policies.base_policy import BasePolicy
from src.core.rollouts.episode import Trajectory, TrajectoryStep, run_episode
from src.core.rollouts.simulator import NavigationSimulator
from src.core.worldgen.environment import Environment

SVG = "{http://www.w3.org/2000/svg}"
SCENARIO = Scenario(
    env_id="empty_room",
    start_pose=Pose(x=2.0, y=5.0, heading=0.0),
    goal=GoalSpec.for_instance("empty_room/ball"),
    seed=0,
)


class StraightPolicy(BasePolicy):
    name = "straight"

    def act(self, observation, state, rng, epsilon=0.0):
        return self.space.center_bin, state


@pytest.fixture
def trajectory(empty_env: Environment) -> Trajectory:
    """Four straight steps toward the ball"""
    sim_config = SimConfig(actions=ActionSpace(k=10))
    sim = NavigationSimulator(empty_env, SCENARIO, sim_config)
    policy = StraightPolicy(sim_config.actions, sim_config.grid)
    return run_episode(sim, policy, RolloutConfig(max_steps=4), keep_observations=False)


def _elements(document: str, css: str) -> list[ET.Element]:
    root = ET.fromstring(document.encode("utf-8"))
    return [e for e in root.iter() if e.get("class") == css]


def test_path_points_are_logged_positions(empty_env: Environment, trajectory: Trajectory) -> None:
    document = svg_document(empty_env, trajectory)

    (path,) = _elements(document, "path")
    points = [tuple(map(float, p.split(","))) for p in path.get("points").split()]

    assert path.tag == f"{SVG}polyline"
    assert points == [(p.x, p.y) for p in trajectory.poses]
    assert len(points) == 5


def test_markers(empty_env: Environment, trajectory: Trajectory) -> None:
    document = svg_document(empty_env, trajectory)

    (start,) = _elements(document, "start")
    (end,) = _elements(document, "end")

    assert float(start.get("cx")) == 2.0
    assert float(end.get("cx")) == trajectory.poses[-1].x
    assert len(_elements(document, "goal")) == 1
    assert not _elements(document, "collision")


def test_collision_is_marked(empty_env: Environment) -> None:
    trajectory = Trajectory(
        steps=[TrajectoryStep(pose=SCENARIO.start_pose, observation=None, action=0, reward=-1.0)],
        terminal=Terminal.COLLISION,
        success=False,
        scenario=SCENARIO,
        final_pose=Pose(x=2.1, y=5.0, heading=0.0),
    )

    assert len(_elements(svg_document(empty_env, trajectory), "collision")) == 1


def test_render_writes_file(tmp_path: Path, empty_env: Environment, trajectory: Trajectory) -> None:
    path = render_trajectory(empty_env, trajectory, tmp_path / "episode.svg")

    assert path.read_text().startswith("<?xml")


def test_render_rejects_other_environment(
    tmp_path: Path, corridor_env: Environment, trajectory: Trajectory
) -> None:
    with pytest.raises(RenderError, match="empty_room"):
        render_trajectory(corridor_env, trajectory, tmp_path / "episode.svg")


def test_render_reports_unwritable_path(
    tmp_path: Path, empty_env: Environment, trajectory: Trajectory
) -> None:
    with pytest.raises(RenderError):
        render_trajectory(empty_env, trajectory, tmp_path / "missing" / "episode.svg")
