from pathlib import Path

import pytest

from src.core.config.config import EvalConfig
from src.core.evalharness.evaluate import evaluate
from src.core.evalharness.suites import (
    EvalSuite,
    SuiteBuildError,
    SuiteBuilder,
    SuiteTag,
    UnknownSuiteError,
    standard_suite,
    straight_path_clear,
)
from src.core.models.geometry import Pose
from src.core.models.perception import PerceptionParams
from src.core.models.scenario import GoalSpec, Scenario, Split
from src.core.policies.baselines import VGMPolicy
from src.core.worldgen.environment import Environment, build_environment
from src.core.worldgen.fixtures import SEEN_FIXTURES, living_room
from src.core.worldgen.randomization import RandomizationRanges
from src.core.worldgen.registry import EnvironmentRegistry


@pytest.fixture
def registry(tmp_path: Path) -> EnvironmentRegistry:
    """Registry holding only the built-in fixtures"""
    return EnvironmentRegistry(data_dir=tmp_path)


def test_build_is_deterministic(empty_env: Environment) -> None:
    builder = SuiteBuilder()

    first = builder.build("mini", [empty_env], Split.SEEN, 3, seed=5)
    second = builder.build("mini", [empty_env], Split.SEEN, 3, seed=5)

    assert first == second
    assert len(first) == 3
    assert len({s.id for s in first.scenarios}) == 3


def test_open_field_in_empty_room(empty_env: Environment) -> None:
    suite = SuiteBuilder().build("open", [empty_env], Split.SEEN, 2, seed=1, tag=SuiteTag.OPEN_FIELD)

    assert suite.tag == SuiteTag.OPEN_FIELD
    assert all(straight_path_clear(empty_env, s) for s in suite.scenarios)


def test_empty_room_has_nothing_in_between(empty_env: Environment) -> None:
    with pytest.raises(SuiteBuildError, match="obstacle_between"):
        SuiteBuilder().build(
            "blocked",
            [empty_env],
            Split.SEEN,
            1,
            seed=0,
            tag=SuiteTag.OBSTACLE_BETWEEN,
            max_attempts=2,
        )


def test_open_start_is_not_occlusion_heavy(empty_env: Environment) -> None:
    scenario = Scenario(
        env_id="empty_room",
        start_pose=Pose(x=2.0, y=5.0, heading=0.0),
        goal=GoalSpec.for_instance("empty_room/ball"),
        seed=0,
    )

    assert not SuiteBuilder().certify(empty_env, scenario, SuiteTag.OCCLUSION_HEAVY)


def test_build_needs_environments() -> None:
    with pytest.raises(SuiteBuildError):
        SuiteBuilder().build("none", [], Split.SEEN, 1, seed=0)


def test_save_and_load(tmp_path: Path, empty_env: Environment) -> None:
    suite = SuiteBuilder().build("mini", [empty_env], Split.SEEN, 2, seed=2)
    path = tmp_path / "suites" / "mini.json"

    suite.save(path)

    assert EvalSuite.load(path) == suite


def test_standard_seen_suite(registry: EnvironmentRegistry) -> None:
    config = EvalConfig(seen_size=3, seed=7)

    suite = standard_suite("seen", config, registry)

    assert suite.split == Split.SEEN
    assert len(suite) == 3
    assert all(s.env_id in SEEN_FIXTURES for s in suite.scenarios)
    assert standard_suite("seen", config, registry) == suite


def test_unknown_suite(registry: EnvironmentRegistry) -> None:
    with pytest.raises(UnknownSuiteError, match="occlusion_heavy"):
        standard_suite("nowhere", EvalConfig(), registry)


def test_barren_environment_passes_its_turn(empty_env: Environment) -> None:
    """Test that an environment without any blocked start is skipped, not fatal"""
    room = build_environment(living_room())

    suite = SuiteBuilder().build(
        "blocked",
        [empty_env, room],
        Split.SEEN,
        3,
        seed=4,
        tag=SuiteTag.OBSTACLE_BETWEEN,
        max_attempts=100,
    )

    assert [s.env_id for s in suite.scenarios] == ["living_room"] * 3
    assert not any(straight_path_clear(room, s) for s in suite.scenarios)


def test_standard_occlusion_heavy_suite(registry: EnvironmentRegistry) -> None:
    config = EvalConfig(occlusion_heavy_size=4, seed=3)

    suite = standard_suite("occlusion_heavy", config, registry)

    assert suite.tag == SuiteTag.OCCLUSION_HEAVY
    assert len(suite) == 4
    builder = SuiteBuilder(config.sim, config.rollout)
    for scenario in suite.scenarios:
        env = registry.get_environment(scenario.env_id)
        assert scenario.env_id in SEEN_FIXTURES
        assert builder.certify(env, scenario, SuiteTag.OCCLUSION_HEAVY)


def test_noiseless_vgm_solves_open_field(
    empty_env: Environment, registry: EnvironmentRegistry
) -> None:
    config = EvalConfig(base_perception=PerceptionParams(), randomization=RandomizationRanges.none())
    suite = SuiteBuilder(config.sim, config.rollout).build(
        "open", [empty_env], Split.SEEN, 4, seed=8, tag=SuiteTag.OPEN_FIELD
    )

    metrics = evaluate(VGMPolicy(config.sim.actions, config.sim.grid), suite, config, registry)

    assert metrics.success_rate == 100.0
