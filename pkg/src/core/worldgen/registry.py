import logging
from pathlib import Path

from src.constants import DATA_DIR, ENVIRONMENTS_SUBDIR
from src.core.models.scenario import Split
from src.core.worldgen.environment import Environment, EnvironmentSpec, build_environment
from src.core.worldgen.fixtures import (
    EXTRA_FIXTURES,
    SEEN_FIXTURES,
    UNSEEN_FIXTURES,
    all_fixture_specs,
)

logger = logging.getLogger(__name__)


class EnvironmentConflictError(Exception):
    def __init__(self, new_spec: EnvironmentSpec, existing_spec: EnvironmentSpec):
        message = (
            f"Environment '{new_spec.id}' already exists with a different layout:\n"
        )
        message += f"Existing: {len(existing_spec.obstacles)} obstacles, "
        message += f"{len(existing_spec.goal_objects)} goal objects\n"
        message += f"New: {len(new_spec.obstacles)} obstacles, "
        message += f"{len(new_spec.goal_objects)} goal objects"
        super().__init__(message)


class EnvironmentNotFoundError(Exception):
    def __init__(self, env_id: str):
        super().__init__(f"Environment '{env_id}' not found.")


class EnvironmentRegistry:
    """Environments by id.

    Specs are registered eagerly; each one is built (validated, free space
    rasterized) the first time it is requested.
    """

    def __init__(self, data_dir: Path | None = None):
        self._specs: dict[str, EnvironmentSpec] = {}
        self._built: dict[str, Environment] = {}
        self._data_dir = data_dir if data_dir is not None else DATA_DIR
        self._load_starting_environments()

    def add_environment(self, spec: EnvironmentSpec) -> None:
        if spec.id in self._specs:
            existing = self._specs[spec.id]
            if existing.model_dump() != spec.model_dump():
                raise EnvironmentConflictError(spec, existing)
            return
        self._specs[spec.id] = spec

    def _add_environments(self, specs: list[EnvironmentSpec]) -> None:
        for spec in specs:
            self.add_environment(spec)

    def _load_starting_environments(self) -> None:
        # Files under the data dir replace the built-in fixture of the same id.
        file_specs = self._read_data_dir()
        overridden = {spec.id for spec in file_specs}
        self._add_environments(file_specs)
        self._add_environments([s for s in all_fixture_specs() if s.id not in overridden])

    def _read_data_dir(self) -> list[EnvironmentSpec]:
        directory = self._data_dir / ENVIRONMENTS_SUBDIR
        if not directory.is_dir():
            return []
        specs = [
            EnvironmentSpec.model_validate_json(path.read_text())
            for path in sorted(directory.glob("*.json"))
        ]
        logger.info("loaded %d environment files from %s", len(specs), directory)
        return specs

    def get_environment(self, env_id: str) -> Environment:
        if env_id not in self._built:
            spec = self._specs.get(env_id)
            if spec is None:
                raise EnvironmentNotFoundError(env_id)
            self._built[env_id] = build_environment(spec)
        return self._built[env_id]

    def ids(self) -> list[str]:
        return list(self._specs)

    def split(self, split: Split) -> list[Environment]:
        names = SEEN_FIXTURES if split == Split.SEEN else UNSEEN_FIXTURES
        return [self.get_environment(env_id) for env_id in names if env_id in self._specs]

    def extras(self) -> list[Environment]:
        return [self.get_environment(env_id) for env_id in EXTRA_FIXTURES if env_id in self._specs]

    def export(self, directory: Path) -> list[Path]:
        """Write every registered environment as a JSON document."""
        written = []
        for env_id in self._specs:
            path = directory / f"{env_id}.json"
            self.get_environment(env_id).save(path)
            written.append(path)
        return written
