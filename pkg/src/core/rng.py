"""Deterministic random streams.

Every subsystem draws from its own generator derived from a base seed and a
path of labels, so results never depend on call order across subsystems or
on how work is split between processes.
"""

import zlib
from typing import Any

import numpy as np


def _path_entropy(component: Any) -> int:
    if isinstance(component, (int, np.integer)):
        return int(component) & 0xFFFFFFFFFFFFFFFF
    # Stable hashing; the builtin hash() is randomized per process.
    return zlib.crc32(str(component).encode("utf-8"))


def derive_seed_sequence(seed: int, *path: Any) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), *(_path_entropy(c) for c in path)])


def derive_rng(seed: int, *path: Any) -> np.random.Generator:
    """Return an independent generator for the stream named by ``path``."""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(seed, *path)))


def derive_seed(seed: int, *path: Any, bits: int = 63) -> int:
    """Return an integer seed for the stream named by ``path``."""
    words = derive_seed_sequence(seed, *path).generate_state(2, dtype=np.uint32)
    value = (int(words[0]) << 32) | int(words[1])
    return value & ((1 << bits) - 1)
