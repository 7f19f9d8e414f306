import pytest

from src.core.worldgen.environment import Environment, build_environment
from src.core.worldgen.fixtures import corridor, empty_room


@pytest.fixture(scope="session")
def empty_env() -> Environment:
    """10 x 10 m room with a single ball at (7, 5)"""
    return build_environment(empty_room())


@pytest.fixture(scope="session")
def corridor_env() -> Environment:
    """12 x 2 m corridor with a plant at its far end"""
    return build_environment(corridor())
