import numpy as np
from scipy import ndimage

from src.core.models.perception import PerceptionParams

# Spurious detections are drawn with a peak between these values.
_FALSE_POSITIVE_PEAK = (0.3, 0.8)
_BLOB_SIGMA = 1.0


def noise_rng(params: PerceptionParams, scenario_seed: int, step: int) -> np.random.Generator:
    """Generator for one frame's semantic noise."""
    sequence = np.random.SeedSequence([params.seed, scenario_seed, step])
    return np.random.Generator(np.random.PCG64(sequence))


def gaussian_blob(n: int, row: float, col: float, sigma: float = _BLOB_SIGMA) -> np.ndarray:
    """n x n map with a unit peak at (row, col)."""
    rows = np.arange(n, dtype=np.float64)[:, None]
    cols = np.arange(n, dtype=np.float64)[None, :]
    return np.exp(-((rows - row) ** 2 + (cols - col) ** 2) / (2.0 * sigma**2))


def apply_noise(
    base: np.ndarray, params: PerceptionParams, rng: np.random.Generator
) -> np.ndarray:
    """Perturb, blur, drop out and add false-positive blobs, then clamp to [0, 1]."""
    out = np.array(base, dtype=np.float64, copy=True)
    if params.semantic_noise_sd > 0.0:
        out += rng.normal(0.0, params.semantic_noise_sd, size=out.shape)
    if params.blur_radius > 0.0:
        out = ndimage.gaussian_filter(out, sigma=params.blur_radius, mode="constant")
    if params.dropout_rate > 0.0:
        out[rng.random(out.shape) < params.dropout_rate] = 0.0
    if params.false_positive_rate > 0.0 and rng.random() < params.false_positive_rate:
        n = out.shape[0]
        row, col = rng.integers(n, size=2)
        peak = rng.uniform(*_FALSE_POSITIVE_PEAK)
        out = np.maximum(out, peak * gaussian_blob(n, float(row), float(col)))
    return np.clip(out, 0.0, 1.0)
