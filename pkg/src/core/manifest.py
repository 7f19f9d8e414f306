import platform
import sys
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field

from src.constants import MANIFEST_FORMAT

MANIFEST_FILE = "manifest.json"
_PACKAGES = ("servosim", "numpy", "scipy", "pydantic", "pyyaml", "psutil")


def package_versions() -> dict[str, str]:
    versions = {"python": platform.python_version()}
    for package in _PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


class RunManifest(BaseModel):
    """What a CLI run needs to be repeated: its argv, resolved config and seeds."""

    format: Literal["divis-manifest/1"] = MANIFEST_FORMAT
    command: str
    argv: list[str]
    config: dict[str, Any] = {}
    seeds: dict[str, int] = {}
    workers: int = 1
    versions: dict[str, str] = Field(default_factory=package_versions)
    created: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    executable: str = sys.executable

    def save(self, directory: str | Path) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / MANIFEST_FILE
        path.write_text(self.model_dump_json(indent=2))
        return path

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_FILE
        return cls.model_validate_json(path.read_text())
