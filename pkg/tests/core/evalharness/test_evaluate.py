from pathlib import Path

import pytest

from src.core.config.config import EvalConfig, RolloutConfig
from src.core.evalharness.compare import EmptyComparisonError, compare
from src.core.evalharness.evaluate import Metrics, ScenarioOutcome, evaluate
from src.core.evalharness.suites import EvalSuite
from src.core.models.dynamics import Terminal
from src.core.models.geometry import Pose
from src.core.models.scenario import GoalSpec, Scenario, Split
from src.core.policies.base_policy import BasePolicy
from src.core.policies.baselines import RandomPolicy
from src.core.worldgen.registry import EnvironmentRegistry

SHORT = EvalConfig(rollout=RolloutConfig(max_steps=5), trials_per_scenario=2)


class StopPolicy(BasePolicy):
    name = "stop"

    def act(self, observation, state, rng, epsilon=0.0):
        return self.space.stop, state


@pytest.fixture
def registry(tmp_path: Path) -> EnvironmentRegistry:
    """Registry holding only the built-in fixtures"""
    return EnvironmentRegistry(data_dir=tmp_path)


@pytest.fixture
def suite() -> EvalSuite:
    """Four starts on the far side of the empty room from its ball"""
    scenarios = [
        Scenario(
            env_id="empty_room",
            start_pose=Pose(x=2.0, y=y, heading=0.0),
            goal=GoalSpec.for_instance("empty_room/ball"),
            seed=seed,
        )
        for seed, y in enumerate([3.0, 4.0, 5.0, 6.0])
    ]
    return EvalSuite(name="mini", split=Split.SEEN, scenarios=scenarios)


def _outcome(scenario_id: str, success: bool, terminal: Terminal) -> ScenarioOutcome:
    return ScenarioOutcome(
        scenario_id=scenario_id, trial=0, success=success, terminal=terminal, steps=4
    )


def test_stopping_far_from_goal_never_succeeds(
    suite: EvalSuite, registry: EnvironmentRegistry
) -> None:
    metrics = evaluate(StopPolicy(), suite, SHORT, registry)

    assert metrics.total == 8
    assert metrics.success_rate == 0.0
    assert metrics.collision_rate == 0.0
    assert metrics.suite == "mini"
    assert metrics.policy == "stop"


def test_results_ignore_scenario_order(suite: EvalSuite, registry: EnvironmentRegistry) -> None:
    reordered = suite.model_copy(update={"scenarios": suite.scenarios[::-1]})

    forward = evaluate(RandomPolicy(), suite, SHORT, registry)
    backward = evaluate(RandomPolicy(), reordered, SHORT, registry)

    def key(o: ScenarioOutcome) -> tuple[str, int]:
        return o.scenario_id, o.trial

    assert sorted(forward.outcomes, key=key) == sorted(backward.outcomes, key=key)


def test_metrics_rates() -> None:
    metrics = Metrics.from_outcomes(
        [
            _outcome("a", True, Terminal.STOPPED),
            _outcome("b", False, Terminal.COLLISION),
            _outcome("c", False, Terminal.MAX_STEPS),
            _outcome("d", True, Terminal.STOPPED),
        ]
    )

    assert metrics.success_rate == 50.0
    assert metrics.collision_rate == 25.0
    assert metrics.mean_length == 4.0


def test_metrics_merge() -> None:
    left = Metrics.from_outcomes([_outcome("a", True, Terminal.STOPPED)], suite="x")
    right = Metrics.from_outcomes([_outcome("b", False, Terminal.COLLISION)], suite="y")

    merged = left.merge(right, suite="both")

    assert merged.total == 2
    assert merged.successes == 1
    assert merged.collisions == 1
    assert merged.suite == "both"


def test_empty_metrics() -> None:
    assert Metrics().success_rate == 0.0


def test_compare_matches_evaluate(suite: EvalSuite, registry: EnvironmentRegistry) -> None:
    table = compare({"random": RandomPolicy()}, [suite], SHORT, registry)

    assert table.metrics["random"]["mini"] == evaluate(RandomPolicy(), suite, SHORT, registry)


def test_compare_table_text(suite: EvalSuite, registry: EnvironmentRegistry, tmp_path: Path) -> None:
    table = compare({"stop": StopPolicy(), "random": RandomPolicy()}, [suite], SHORT, registry)

    lines = table.to_text().splitlines()
    json_path, text_path = table.save(tmp_path)

    assert lines[0].split() == ["policy", "mini"]
    assert lines[2].split() == ["stop", "0.0"]
    assert lines[3].startswith("random")
    assert json_path.exists()
    assert text_path.read_text() == table.to_text()


@pytest.mark.parametrize("empty", ["policies", "suites"])
def test_compare_needs_something(suite: EvalSuite, empty: str) -> None:
    policies = {} if empty == "policies" else {"stop": StopPolicy()}
    suites = [] if empty == "suites" else [suite]

    with pytest.raises(EmptyComparisonError, match=empty):
        compare(policies, suites)
