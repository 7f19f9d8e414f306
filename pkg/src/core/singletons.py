from src.core.worldgen.registry import EnvironmentRegistry


ENV_REGISTRY = EnvironmentRegistry()
