from dataclasses import dataclass, field
from enum import StrEnum, auto

import numpy as np

from src.core.rng import derive_rng

HIDDEN_CHANNELS = 16
KERNEL_SIZE = 3

# Serialization order of the tensors; checkpoints rely on it.
TENSOR_ORDER = (
    "conv1_w",
    "conv1_b",
    "gru_wz",
    "gru_uz",
    "gru_bz",
    "gru_wr",
    "gru_ur",
    "gru_br",
    "gru_wh",
    "gru_uh",
    "gru_bh",
    "head_w",
    "head_b",
)


class Variant(StrEnum):
    REACTIVE = auto()
    RECURRENT = auto()
    RECURRENT_FLOW = auto()

    @property
    def input_channels(self) -> int:
        return {Variant.REACTIVE: 2, Variant.RECURRENT: 4, Variant.RECURRENT_FLOW: 6}[self]

    @property
    def is_recurrent(self) -> bool:
        return self != Variant.REACTIVE


def tensor_shapes(
    variant: Variant, n: int, k: int, hidden: int = HIDDEN_CHANNELS
) -> dict[str, tuple[int, ...]]:
    c_in = variant.input_channels
    kk = KERNEL_SIZE
    shapes: dict[str, tuple[int, ...]] = {
        "conv1_w": (hidden, c_in, kk, kk),
        "conv1_b": (hidden,),
    }
    for gate in ("z", "r", "h"):
        shapes[f"gru_w{gate}"] = (hidden, hidden, kk, kk)
        shapes[f"gru_u{gate}"] = (hidden, hidden, kk, kk)
        shapes[f"gru_b{gate}"] = (hidden,)
    # The head sees one feature per (channel, bearing column).
    shapes["head_w"] = (k, hidden * n)
    shapes["head_b"] = (k,)
    return {name: shapes[name] for name in TENSOR_ORDER}


@dataclass(frozen=True)
class QPolicyParams:
    """Q-network weights: 3x3 conv, convolutional GRU, linear head.

    Tensors are kept in the dtype they were created with (float32 for
    trained snapshots); the network always computes in float64.
    """

    variant: Variant
    n: int
    k: int
    tensors: dict[str, np.ndarray] = field(repr=False)

    @property
    def hidden(self) -> int:
        return int(self.tensors["conv1_b"].shape[0])

    @property
    def input_channels(self) -> int:
        return self.variant.input_channels

    @property
    def num_parameters(self) -> int:
        return sum(int(t.size) for t in self.tensors.values())

    def replace(self, tensors: dict[str, np.ndarray]) -> "QPolicyParams":
        return QPolicyParams(self.variant, self.n, self.k, tensors)

    def astype(self, dtype: type) -> "QPolicyParams":
        return self.replace({name: t.astype(dtype) for name, t in self.tensors.items()})

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {name: np.zeros(t.shape, dtype=np.float64) for name, t in self.tensors.items()}


def init_params(
    variant: Variant,
    n: int,
    k: int,
    seed: int = 0,
    hidden: int = HIDDEN_CHANNELS,
) -> QPolicyParams:
    """Fan-in scaled normal weights, zero biases, stored as float32."""
    rng = derive_rng(seed, "qnet-init", variant.value)
    tensors = {}
    for name, shape in tensor_shapes(variant, n, k, hidden).items():
        if len(shape) == 1:
            tensors[name] = np.zeros(shape, dtype=np.float32)
            continue
        fan_in = int(np.prod(shape[1:]))
        tensors[name] = (rng.standard_normal(shape) / np.sqrt(fan_in)).astype(np.float32)
    return QPolicyParams(variant=variant, n=n, k=k, tensors=tensors)
