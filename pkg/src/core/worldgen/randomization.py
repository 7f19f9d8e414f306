from pydantic import BaseModel, ConfigDict, Field

from src.constants import UNSEEN_SEED_BIT
from src.core.models.perception import PerceptionParams
from src.core.models.scenario import Split
from src.core.rng import derive_rng, derive_seed


class RandomizationRanges(BaseModel):
    """Half-widths of the uniform jitter applied to each perception parameter."""

    model_config = ConfigDict(frozen=True)

    semantic_noise_sd: float = Field(default=0.08, ge=0.0)
    false_positive_rate: float = Field(default=0.15, ge=0.0)
    blur_radius: float = Field(default=0.6, ge=0.0)
    dropout_rate: float = Field(default=0.08, ge=0.0)

    @classmethod
    def none(cls) -> "RandomizationRanges":
        return cls(
            semantic_noise_sd=0.0,
            false_positive_rate=0.0,
            blur_radius=0.0,
            dropout_rate=0.0,
        )


DEFAULT_BASE_PERCEPTION = PerceptionParams(
    semantic_noise_sd=0.08,
    false_positive_rate=0.15,
    blur_radius=0.6,
    dropout_rate=0.08,
)


def perception_seed(seed: int, split: Split) -> int:
    """63-bit seed; the top bit of the 64-bit space marks the unseen split."""
    value = derive_seed(seed, "perception-seed", bits=63)
    return value | UNSEEN_SEED_BIT if split == Split.UNSEEN else value


def _jitter(base: float, half_width: float, draw: float, upper: float | None) -> float:
    if half_width == 0.0:
        return base
    value = base + (2.0 * draw - 1.0) * half_width
    value = max(value, 0.0)
    return min(value, upper) if upper is not None else value


def randomize_perception(
    base: PerceptionParams,
    seed: int,
    ranges: RandomizationRanges = RandomizationRanges(),
    split: Split = Split.SEEN,
) -> PerceptionParams:
    """Jitter ``base`` within ``ranges``; the result carries a split-tagged noise seed."""
    draws = derive_rng(seed, "perception").random(4)
    return PerceptionParams(
        semantic_noise_sd=_jitter(base.semantic_noise_sd, ranges.semantic_noise_sd, draws[0], None),
        false_positive_rate=_jitter(
            base.false_positive_rate, ranges.false_positive_rate, draws[1], 1.0
        ),
        blur_radius=_jitter(base.blur_radius, ranges.blur_radius, draws[2], None),
        dropout_rate=_jitter(base.dropout_rate, ranges.dropout_rate, draws[3], 1.0),
        seed=perception_seed(seed, split),
    )
