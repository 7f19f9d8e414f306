from enum import StrEnum
from pathlib import Path

from src.core.models.dynamics import ActionSpace
from src.core.models.perception import EgoGrid
from src.core.policies.base_policy import BasePolicy
from src.core.policies.baselines import RandomPolicy, VGMCollisionPolicy, VGMPolicy
from src.core.policies.q_policy import QPolicy
from src.core.qnet.checkpoint import load_checkpoint
from src.core.qnet.params import Variant


class PolicyKind(StrEnum):
    RANDOM = "random"
    VGM = "vgm"
    VGM_COLLISION = "vgm-collision"
    REACTIVE = "reactive"
    RECURRENT = "recurrent"
    RECURRENT_FLOW = "recurrent-flow"

    @property
    def variant(self) -> Variant | None:
        return {
            PolicyKind.REACTIVE: Variant.REACTIVE,
            PolicyKind.RECURRENT: Variant.RECURRENT,
            PolicyKind.RECURRENT_FLOW: Variant.RECURRENT_FLOW,
        }.get(self)


class MissingCheckpointError(Exception):
    def __init__(self, kind: PolicyKind):
        super().__init__(f"Policy '{kind}' needs a checkpoint (--checkpoint).")


class CheckpointVariantError(Exception):
    def __init__(self, kind: PolicyKind, found: Variant):
        super().__init__(f"Policy '{kind}' cannot run a '{found}' checkpoint.")


def make_policy(
    kind: PolicyKind | str,
    space: ActionSpace = ActionSpace(),
    grid: EgoGrid = EgoGrid(),
    checkpoint: str | Path | None = None,
) -> BasePolicy:
    kind = PolicyKind(kind)
    if kind == PolicyKind.RANDOM:
        return RandomPolicy(space, grid)
    if kind == PolicyKind.VGM:
        return VGMPolicy(space, grid)
    if kind == PolicyKind.VGM_COLLISION:
        return VGMCollisionPolicy(space, grid)
    if checkpoint is None:
        raise MissingCheckpointError(kind)
    params, _ = load_checkpoint(checkpoint)
    if params.variant != kind.variant:
        raise CheckpointVariantError(kind, params.variant)
    return QPolicy(params, space, grid)
