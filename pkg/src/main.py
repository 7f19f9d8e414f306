"""Command-line entry point: ``servosim <subcommand> [flags]``.

Exit status is 0 on success, 1 for usage and configuration errors and 2 for
anything that fails while running. Every subcommand that writes artifacts
also writes a ``manifest.json`` next to them.
"""

import argparse
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from src.core.config.config import (
    BaseConfig,
    ConfigError,
    ConfigNotFoundError,
    EvalConfig,
    TrainConfig,
)
from src.core.evalharness.compare import EmptyComparisonError, compare
from src.core.evalharness.evaluate import evaluate, trial_seed
from src.core.evalharness.render import render_trajectory
from src.core.evalharness.suites import (
    STANDARD_SUITES,
    EvalSuite,
    UnknownSuiteError,
    standard_suite,
)
from src.core.manifest import RunManifest
from src.core.models.scenario import Split
from src.core.policies.base_policy import BasePolicy
from src.core.policies.factory import (
    CheckpointVariantError,
    MissingCheckpointError,
    PolicyKind,
    make_policy,
)
from src.core.rollouts.dense import DenseTrajectory, dense_rollout
from src.core.rollouts.episode import run_episode
from src.core.rollouts.logs import read_trajectory, write_trajectory
from src.core.rollouts.simulator import NavigationSimulator
from src.core.singletons import ENV_REGISTRY
from src.core.training.trainer import train
from src.core.worker_pool import WorkerPool
from src.core.worldgen.randomization import randomize_perception

logger = logging.getLogger("servosim")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
DEFAULT_SUITES = ["seen", "unseen", "occlusion_heavy"]


class UsageError(Exception):
    pass


USAGE_ERRORS = (
    UsageError,
    ConfigNotFoundError,
    ConfigError,
    UnknownSuiteError,
    MissingCheckpointError,
    CheckpointVariantError,
    EmptyComparisonError,
)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML or JSON config document")
    common.add_argument("--seed", type=int, help="overrides the config seed (default 0)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="config override"
    )
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return common


def _policy_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--policy", choices=[k.value for k in PolicyKind], default=PolicyKind.RANDOM.value
    )
    parser.add_argument("--checkpoint", type=Path, help="Q-network checkpoint")


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _ArgumentParser(prog="servosim", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser(
        "gen-env-fixtures", parents=[common], help="write the environment fixtures as JSON"
    )

    gen = commands.add_parser("gen-scenarios", parents=[common], help="build evaluation suites")
    gen.add_argument("--suite", action="append", help="suite name (repeatable, default: all)")

    rollout = commands.add_parser("rollout", parents=[common], help="log episodes on a suite")
    _policy_flags(rollout)
    rollout.add_argument("--suite", default="seen", help="suite name or suite JSON file")
    rollout.add_argument("--limit", type=int, help="only the first N scenarios")
    rollout.add_argument("--dense", action="store_true", help="also branch every action")
    rollout.add_argument("--no-observations", action="store_true", help="omit observations")

    commands.add_parser("train", parents=[common], help="batch RL training run")

    ev = commands.add_parser("evaluate", parents=[common], help="evaluate a policy on a suite")
    _policy_flags(ev)
    ev.add_argument("--suite", default="seen", help="suite name or suite JSON file")

    cmp = commands.add_parser("compare", parents=[common], help="success-rate table")
    cmp.add_argument(
        "--policy",
        action="append",
        metavar="KIND[=CHECKPOINT]",
        help="policy to compare (repeatable, default: the baselines)",
    )
    cmp.add_argument("--suite", action="append", help="suite name or file (repeatable)")

    render = commands.add_parser("render", parents=[common], help="SVG of a logged trajectory")
    render.add_argument("trajectory", type=Path, help="trajectory log (.jsonl)")
    return parser


def _load_config(cls: type[BaseConfig], args: argparse.Namespace) -> Any:
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.config is not None:
        return cls.load(args.config, overrides)
    return cls.from_overrides(overrides)


def _require_out(args: argparse.Namespace) -> Path:
    if args.out is None:
        raise UsageError(f"{args.command} needs --out")
    return args.out


def _resolve_suite(value: str, config: EvalConfig) -> EvalSuite:
    path = Path(value)
    if path.suffix == ".json":
        if not path.exists():
            raise UsageError(f"suite file not found: {path}")
        return EvalSuite.load(path)
    return standard_suite(value, config, ENV_REGISTRY)


def _make_policy(kind: str, checkpoint: Path | None, config: EvalConfig) -> BasePolicy:
    return make_policy(kind, config.sim.actions, config.sim.grid, checkpoint)


def _write_manifest(
    args: argparse.Namespace,
    argv: list[str],
    out: Path,
    config: BaseConfig | None = None,
    workers: int = 1,
) -> None:
    manifest = RunManifest(
        command=args.command,
        argv=argv,
        config=config.model_dump(mode="json") if config is not None else {},
        seeds={"seed": config.seed} if config is not None else {},
        workers=workers,
    )
    manifest.save(out)


def cmd_gen_env_fixtures(args: argparse.Namespace, argv: list[str]) -> int:
    out = _require_out(args)
    written = ENV_REGISTRY.export(out / "environments")
    logger.info("wrote %d environments to %s", len(written), out / "environments")
    _write_manifest(args, argv, out)
    return EXIT_OK


def cmd_gen_scenarios(args: argparse.Namespace, argv: list[str]) -> int:
    out = _require_out(args)
    config = _load_config(EvalConfig, args)
    for name in args.suite or list(STANDARD_SUITES):
        suite = standard_suite(name, config, ENV_REGISTRY)
        suite.save(out / "suites" / f"{name}.json")
    _write_manifest(args, argv, out, config)
    return EXIT_OK


def cmd_rollout(args: argparse.Namespace, argv: list[str]) -> int:
    out = _require_out(args)
    config = _load_config(EvalConfig, args)
    policy = _make_policy(args.policy, args.checkpoint, config)
    suite = _resolve_suite(args.suite, config)
    scenarios = suite.scenarios[: args.limit] if args.limit is not None else suite.scenarios
    with WorkerPool(args.workers) as pool:
        for i, scenario in enumerate(scenarios):
            seed = trial_seed(config, scenario, 0)
            perception = randomize_perception(
                config.base_perception, seed, config.randomization, suite.split
            )
            sim = NavigationSimulator(
                ENV_REGISTRY.get_environment(scenario.env_id), scenario, config.sim, perception
            )
            if args.dense:
                trajectory = dense_rollout(sim, policy, config.rollout, seed, pool)
            else:
                trajectory = run_episode(sim, policy, config.rollout, seed)
            path = out / "trajectories" / f"{i:04d}.jsonl"
            write_trajectory(path, trajectory, include_observations=not args.no_observations)
            logger.debug("logged %s to %s", scenario.id, path)
        workers = pool.workers
    logger.info("logged %d episodes of %s on %s", len(scenarios), policy.name, suite.name)
    _write_manifest(args, argv, out, config, workers)
    return EXIT_OK


def cmd_train(args: argparse.Namespace, argv: list[str]) -> int:
    out = _require_out(args)
    config = _load_config(TrainConfig, args)
    if config.environments is not None:
        environments = [ENV_REGISTRY.get_environment(env_id) for env_id in config.environments]
    else:
        environments = ENV_REGISTRY.split(Split.SEEN)
    with WorkerPool(args.workers) as pool:
        _write_manifest(args, argv, out, config, pool.workers)
        report = train(environments, config, out, pool)
    if report.final is not None:
        logger.info("finished at %s", report.final.checkpoint)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, argv: list[str]) -> int:
    out = _require_out(args)
    config = _load_config(EvalConfig, args)
    policy = _make_policy(args.policy, args.checkpoint, config)
    suite = _resolve_suite(args.suite, config)
    with WorkerPool(args.workers) as pool:
        metrics = evaluate(policy, suite, config, ENV_REGISTRY, pool)
        workers = pool.workers
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(metrics.model_dump_json(indent=2))
    _write_manifest(args, argv, out, config, workers)
    return EXIT_OK


def _parse_policy_arg(value: str) -> tuple[str, Path | None]:
    kind, sep, checkpoint = value.partition("=")
    if kind not in {k.value for k in PolicyKind}:
        raise UsageError(f"unknown policy '{kind}'")
    return kind, Path(checkpoint) if sep else None


def cmd_compare(args: argparse.Namespace, argv: list[str]) -> int:
    out = _require_out(args)
    config = _load_config(EvalConfig, args)
    specs = args.policy or [PolicyKind.RANDOM, PolicyKind.VGM, PolicyKind.VGM_COLLISION]
    # Rows are named by the full --policy value so two checkpoints of one kind both show.
    policies: dict[str, BasePolicy] = {}
    for value in map(str, specs):
        if value in policies:
            raise UsageError(f"policy '{value}' given twice")
        kind, checkpoint = _parse_policy_arg(value)
        policies[value] = _make_policy(kind, checkpoint, config)
    suites = [_resolve_suite(name, config) for name in args.suite or DEFAULT_SUITES]
    with WorkerPool(args.workers) as pool:
        table = compare(policies, suites, config, ENV_REGISTRY, pool)
        workers = pool.workers
    table.save(out)
    sys.stdout.write(table.to_text())
    _write_manifest(args, argv, out, config, workers)
    return EXIT_OK


def cmd_render(args: argparse.Namespace, argv: list[str]) -> int:
    if not args.trajectory.exists():
        raise UsageError(f"trajectory not found: {args.trajectory}")
    trajectory = read_trajectory(args.trajectory)
    if isinstance(trajectory, DenseTrajectory):
        trajectory = trajectory.base
    if trajectory.scenario is None:
        raise UsageError(f"{args.trajectory} does not name its scenario")
    out = args.out if args.out is not None else args.trajectory.parent
    path = out / f"{args.trajectory.stem}.svg"
    out.mkdir(parents=True, exist_ok=True)
    env = ENV_REGISTRY.get_environment(trajectory.scenario.env_id)
    render_trajectory(env, trajectory, path)
    logger.info("rendered %s", path)
    _write_manifest(args, argv, out)
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace, list[str]], int]] = {
    "gen-env-fixtures": cmd_gen_env_fixtures,
    "gen-scenarios": cmd_gen_scenarios,
    "rollout": cmd_rollout,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "render": cmd_render,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, stream=sys.stderr, force=True)
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logging.getLogger().setLevel(logging.DEBUG)
        return COMMANDS[args.command](args, argv)
    except USAGE_ERRORS as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except Exception as e:
        logger.debug("run failed", exc_info=True)
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
