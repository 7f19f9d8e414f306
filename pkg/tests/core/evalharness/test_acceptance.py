"""Benchmark-level checks: default suites, baseline behaviour and the trained ladder.

The ladder tests train every Q-network variant with the default TrainConfig
and take a long time; they share one training run per variant.
"""

from pathlib import Path

import pytest

from src.core.config.config import EvalConfig, TrainConfig
from src.core.evalharness.evaluate import evaluate
from src.core.evalharness.suites import EvalSuite, SuiteTag, standard_suite
from src.core.models.dynamics import Terminal
from src.core.models.perception import PerceptionParams
from src.core.models.scenario import Split
from src.core.policies.base_policy import BasePolicy
from src.core.policies.factory import PolicyKind, make_policy
from src.core.singletons import ENV_REGISTRY
from src.core.training.trainer import TrainReport, checkpoint_name, train
from src.core.worker_pool import WorkerPool
from src.core.worldgen.randomization import RandomizationRanges

pytestmark = pytest.mark.slow

EVAL = EvalConfig()
NOISELESS = EvalConfig(base_perception=PerceptionParams(), randomization=RandomizationRanges.none())
LADDER = [PolicyKind.REACTIVE, PolicyKind.RECURRENT, PolicyKind.RECURRENT_FLOW]


@pytest.fixture(scope="module")
def pool():
    with WorkerPool() as pool:
        yield pool


@pytest.fixture(scope="module")
def suites() -> dict[str, EvalSuite]:
    return {
        name: standard_suite(name, EVAL, ENV_REGISTRY)
        for name in ("seen", "unseen", "occlusion_heavy")
    }


@pytest.fixture(scope="module")
def trained(
    tmp_path_factory: pytest.TempPathFactory, pool: WorkerPool
) -> dict[PolicyKind, tuple[TrainReport, Path]]:
    """One default training run per Q-network variant"""
    environments = ENV_REGISTRY.split(Split.SEEN)
    runs = {}
    for kind in LADDER:
        out = tmp_path_factory.mktemp(kind.value)
        config = TrainConfig(variant=kind.variant)
        report = train(environments, config, out, pool)
        runs[kind] = report, out / checkpoint_name(config.batches - 1)
    return runs


@pytest.fixture(scope="module")
def policies(trained: dict[PolicyKind, tuple[TrainReport, Path]]) -> dict[PolicyKind, BasePolicy]:
    found = {
        kind: make_policy(kind, EVAL.sim.actions, EVAL.sim.grid, checkpoint)
        for kind, (_, checkpoint) in trained.items()
    }
    found[PolicyKind.RANDOM] = make_policy(PolicyKind.RANDOM, EVAL.sim.actions, EVAL.sim.grid)
    return found


def _success(
    policies: dict[PolicyKind, BasePolicy],
    kind: PolicyKind,
    suite: EvalSuite,
    pool: WorkerPool,
) -> float:
    return evaluate(policies[kind], suite, EVAL, ENV_REGISTRY, pool).success_rate


def test_default_occlusion_heavy_suite(suites: dict[str, EvalSuite]) -> None:
    suite = suites["occlusion_heavy"]

    assert suite.tag == SuiteTag.OCCLUSION_HEAVY
    assert len(suite) == EVAL.occlusion_heavy_size


def test_vgm_needs_a_clear_path(pool: WorkerPool) -> None:
    """Test that greedy matching solves open fields and mostly crashes when blocked"""
    vgm = make_policy(PolicyKind.VGM, NOISELESS.sim.actions, NOISELESS.sim.grid)

    open_field = evaluate(
        vgm, standard_suite("open_field", NOISELESS, ENV_REGISTRY), NOISELESS, ENV_REGISTRY, pool
    )
    blocked = evaluate(
        vgm, standard_suite("obstacle_between", EVAL, ENV_REGISTRY), EVAL, ENV_REGISTRY, pool
    )

    assert open_field.success_rate == 100.0
    assert blocked.success_rate <= 30.0
    failures = [o for o in blocked.outcomes if not o.success]
    crashes = [o for o in failures if o.terminal == Terminal.COLLISION]
    assert len(crashes) > len(failures) / 2


def test_training_improves_rollout_success(
    trained: dict[PolicyKind, tuple[TrainReport, Path]],
) -> None:
    report, _ = trained[PolicyKind.RECURRENT_FLOW]
    # Batches hold few episodes, so the end of the run is averaged over its last ten.
    tail = report.batches[-10:]
    final = sum(b.success_rate for b in tail) / len(tail)

    assert final >= report.batches[0].success_rate + 30.0


def test_policy_ladder_on_seen_suite(
    policies: dict[PolicyKind, BasePolicy], suites: dict[str, EvalSuite], pool: WorkerPool
) -> None:
    rate = {kind: _success(policies, kind, suites["seen"], pool) for kind in policies}

    assert rate[PolicyKind.RECURRENT_FLOW] >= rate[PolicyKind.RECURRENT]
    assert rate[PolicyKind.RECURRENT] >= rate[PolicyKind.REACTIVE]
    assert rate[PolicyKind.RECURRENT_FLOW] >= 60.0
    assert rate[PolicyKind.RANDOM] <= 35.0
    assert rate[PolicyKind.RECURRENT_FLOW] >= 2.0 * rate[PolicyKind.RANDOM]


def test_memory_pays_off_under_occlusion(
    policies: dict[PolicyKind, BasePolicy], suites: dict[str, EvalSuite], pool: WorkerPool
) -> None:
    suite = suites["occlusion_heavy"]

    flow = _success(policies, PolicyKind.RECURRENT_FLOW, suite, pool)
    reactive = _success(policies, PolicyKind.REACTIVE, suite, pool)

    assert flow >= reactive + 10.0


def test_recurrent_flow_generalizes_to_unseen(
    policies: dict[PolicyKind, BasePolicy], suites: dict[str, EvalSuite], pool: WorkerPool
) -> None:
    seen = _success(policies, PolicyKind.RECURRENT_FLOW, suites["seen"], pool)
    unseen = _success(policies, PolicyKind.RECURRENT_FLOW, suites["unseen"], pool)

    assert abs(seen - unseen) <= 15.0
