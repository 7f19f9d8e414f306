"""Checkpoint files.

Layout:
    b"divis-ckpt/1\\n"
    uint32 little-endian length of the JSON header
    JSON header (CheckpointHeader)
    every tensor in TENSOR_ORDER as row-major little-endian float32
"""

import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ValidationError

from src.constants import CHECKPOINT_FORMAT
from src.core.qnet.params import TENSOR_ORDER, QPolicyParams, Variant, tensor_shapes

_MAGIC = (CHECKPOINT_FORMAT + "\n").encode("ascii")


class CheckpointFormatError(Exception):
    def __init__(self, path: str | Path, reason: str):
        super().__init__(f"Checkpoint '{path}' is not readable: {reason}")


class CheckpointHeader(BaseModel):
    format: str = CHECKPOINT_FORMAT
    variant: Variant
    n: int
    k: int
    hidden: int
    metadata: dict[str, Any] = {}


def save_checkpoint(
    path: str | Path, params: QPolicyParams, metadata: dict[str, Any] | None = None
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = CheckpointHeader(
        variant=params.variant,
        n=params.n,
        k=params.k,
        hidden=params.hidden,
        metadata=metadata or {},
    )
    blob = header.model_dump_json().encode("utf-8")
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(len(blob).to_bytes(4, "little"))
        f.write(blob)
        for name in TENSOR_ORDER:
            f.write(np.ascontiguousarray(params.tensors[name], dtype="<f4").tobytes())


def read_header(path: str | Path) -> CheckpointHeader:
    return _read(path)[0]


def load_checkpoint(path: str | Path) -> tuple[QPolicyParams, dict[str, Any]]:
    header, payload = _read(path)
    shapes = tensor_shapes(header.variant, header.n, header.k, header.hidden)
    expected = sum(int(np.prod(s)) for s in shapes.values()) * 4
    if len(payload) != expected:
        raise CheckpointFormatError(path, f"expected {expected} tensor bytes, found {len(payload)}")
    tensors = {}
    offset = 0
    for name, shape in shapes.items():
        count = int(np.prod(shape))
        flat = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        tensors[name] = flat.astype(np.float32).reshape(shape)
        offset += count * 4
    params = QPolicyParams(variant=header.variant, n=header.n, k=header.k, tensors=tensors)
    return params, header.metadata


def _read(path: str | Path) -> tuple[CheckpointHeader, bytes]:
    path = Path(path)
    data = path.read_bytes()
    if not data.startswith(_MAGIC):
        raise CheckpointFormatError(path, f"missing '{CHECKPOINT_FORMAT}' header")
    start = len(_MAGIC)
    if len(data) < start + 4:
        raise CheckpointFormatError(path, "truncated header")
    size = int.from_bytes(data[start : start + 4], "little")
    body = data[start + 4 : start + 4 + size]
    try:
        header = CheckpointHeader.model_validate(json.loads(body))
    except (json.JSONDecodeError, UnicodeDecodeError, ValidationError) as e:
        raise CheckpointFormatError(path, f"bad header ({e})") from e
    if header.format != CHECKPOINT_FORMAT:
        raise CheckpointFormatError(path, f"unsupported format '{header.format}'")
    return header, data[start + 4 + size :]
