from src.core.evalharness.compare import compare
from src.core.evalharness.evaluate import evaluate
from src.core.evalharness.render import render_trajectory
from src.core.policies.factory import make_policy
from src.core.rollouts.dense import dense_rollout
from src.core.rollouts.episode import run_episode
from src.core.rollouts.simulator import NavigationSimulator
from src.core.singletons import ENV_REGISTRY
from src.core.training.trainer import train
from src.main import main

__all__ = [
    "ENV_REGISTRY",
    "NavigationSimulator",
    "compare",
    "dense_rollout",
    "evaluate",
    "main",
    "make_policy",
    "render_trajectory",
    "run_episode",
    "train",
]
