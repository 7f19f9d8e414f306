import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.constants import (
    DEFAULT_FOV,
    DEFAULT_GRID_SIZE,
    DEFAULT_MAX_RANGE,
    DEFAULT_SIGHT_RANGE,
)


class PerceptionParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    semantic_noise_sd: float = Field(default=0.0, ge=0.0)
    false_positive_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    blur_radius: float = Field(default=0.0, ge=0.0)
    dropout_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=1 << 64)

    @property
    def is_noiseless(self) -> bool:
        return (
            self.semantic_noise_sd == 0.0
            and self.false_positive_rate == 0.0
            and self.blur_radius == 0.0
            and self.dropout_rate == 0.0
        )


class EgoGrid(BaseModel):
    """Egocentric polar grid.

    Columns are bearing bins across the field of view, left to right; rows are
    range bins from the agent outwards.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(default=DEFAULT_GRID_SIZE, ge=4)
    fov: float = Field(default=DEFAULT_FOV, gt=0.0, lt=2.0 * math.pi)
    max_range: float = Field(default=DEFAULT_MAX_RANGE, gt=0.0)
    sight_range: float = Field(default=DEFAULT_SIGHT_RANGE, gt=0.0)

    @model_validator(mode="after")
    def _sight_covers_grid(self) -> "EgoGrid":
        if self.sight_range < self.max_range:
            raise ValueError("sight_range must be at least max_range")
        return self

    @property
    def column_width(self) -> float:
        return self.fov / self.n

    @property
    def row_height(self) -> float:
        return self.max_range / self.n

    @property
    def bearings(self) -> np.ndarray:
        """Center bearing of each column (radians, positive = left)."""
        return self.fov / 2.0 - (np.arange(self.n) + 0.5) * self.column_width

    @property
    def row_centers(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.row_height

    def column_of(self, bearing: float) -> int:
        column = math.floor((self.fov / 2.0 - bearing) / self.column_width)
        return min(max(column, 0), self.n - 1)

    def row_of(self, distance: float) -> int:
        row = math.floor(distance / self.row_height)
        return min(max(row, 0), self.n - 1)

    def in_view(self, bearing: float) -> bool:
        return abs(bearing) <= self.fov / 2.0


@dataclass(frozen=True)
class ObservationStack:
    """Channel stack [phi_c_t, phi_c_prev, phi_s_t, phi_s_prev, psi]."""

    phi_c_t: np.ndarray
    phi_c_prev: np.ndarray
    phi_s_t: np.ndarray
    phi_s_prev: np.ndarray
    psi: np.ndarray  # (n, n, 2): column shift, rows approached

    @property
    def n(self) -> int:
        return self.phi_c_t.shape[0]

    def channels(self, count: int) -> np.ndarray:
        """Channel-first array holding the first ``count`` policy inputs.

        2 -> [phi_c_t, phi_s_t]; 4 -> [phi_c_t, phi_c_prev, phi_s_t, phi_s_prev];
        6 -> the four maps followed by both flow components.
        """
        if count == 2:
            planes = [self.phi_c_t, self.phi_s_t]
        elif count == 4:
            planes = [self.phi_c_t, self.phi_c_prev, self.phi_s_t, self.phi_s_prev]
        elif count == 6:
            planes = [
                self.phi_c_t,
                self.phi_c_prev,
                self.phi_s_t,
                self.phi_s_prev,
                self.psi[..., 0],
                self.psi[..., 1],
            ]
        else:
            raise ValueError(f"no observation layout with {count} channels")
        return np.stack(planes).astype(np.float64)

    def to_bytes(self) -> bytes:
        """Row-major little-endian float32, channels in stack order."""
        parts = [
            self.phi_c_t,
            self.phi_c_prev,
            self.phi_s_t,
            self.phi_s_prev,
            self.psi,
        ]
        return b"".join(np.ascontiguousarray(p, dtype="<f4").tobytes() for p in parts)

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "ObservationStack":
        flat = np.frombuffer(data, dtype="<f4").astype(np.float64)
        if flat.size != 6 * n * n:
            raise ValueError(f"expected {6 * n * n} values, got {flat.size}")
        maps = flat[: 4 * n * n].reshape(4, n, n)
        psi = flat[4 * n * n :].reshape(n, n, 2)
        return cls(maps[0], maps[1], maps[2], maps[3], psi)
