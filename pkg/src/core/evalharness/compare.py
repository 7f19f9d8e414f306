from collections.abc import Mapping, Sequence
from pathlib import Path

from pydantic import BaseModel

from src.core.config.config import EvalConfig
from src.core.evalharness.evaluate import Metrics, evaluate
from src.core.evalharness.suites import EvalSuite
from src.core.policies.base_policy import BasePolicy
from src.core.worker_pool import INLINE, WorkerPool
from src.core.worldgen.registry import EnvironmentRegistry


class EmptyComparisonError(Exception):
    def __init__(self, what: str):
        super().__init__(f"Nothing to compare: no {what} given.")


class ComparisonTable(BaseModel):
    """Success rates per (policy, suite), with the metrics behind them."""

    policies: list[str]
    suites: list[str]
    metrics: dict[str, dict[str, Metrics]]

    def success_rate(self, policy: str, suite: str) -> float:
        return self.metrics[policy][suite].success_rate

    def to_text(self) -> str:
        header = ["policy", *self.suites]
        rows = [
            [policy, *(f"{self.success_rate(policy, s):.1f}" for s in self.suites)]
            for policy in self.policies
        ]
        widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
        lines = []
        for row in [header, *rows]:
            cells = [row[0].ljust(widths[0])]
            cells += [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
            lines.append("  ".join(cells).rstrip())
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def save(self, directory: str | Path) -> tuple[Path, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        json_path = directory / "comparison.json"
        text_path = directory / "comparison.txt"
        json_path.write_text(self.model_dump_json(indent=2))
        text_path.write_text(self.to_text())
        return json_path, text_path


def compare(
    policies: Mapping[str, BasePolicy],
    suites: Sequence[EvalSuite],
    config: EvalConfig = EvalConfig(),
    registry: EnvironmentRegistry | None = None,
    pool: WorkerPool = INLINE,
) -> ComparisonTable:
    if not policies:
        raise EmptyComparisonError("policies")
    if not suites:
        raise EmptyComparisonError("suites")
    metrics = {
        name: {suite.name: evaluate(policy, suite, config, registry, pool) for suite in suites}
        for name, policy in policies.items()
    }
    return ComparisonTable(
        policies=list(policies), suites=[s.name for s in suites], metrics=metrics
    )
