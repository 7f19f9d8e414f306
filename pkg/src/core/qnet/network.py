"""Forward and backward passes of the Q-network.

One step of the network, for input x and hidden state h:

    a = tanh(conv(x, W1) + b1)
    z = sigmoid(conv(a, Wz) + conv(h, Uz) + bz)
    r = sigmoid(conv(a, Wr) + conv(h, Ur) + br)
    c = tanh(conv(a, Wh) + conv(r * h, Uh) + bh)
    h' = (1 - z) * h + z * c
    q = head_w @ mean_rows(h') + head_b

The reactive variant runs the same cell from h = 0 at every step.
"""

from dataclasses import dataclass

import numpy as np

from src.core.models.perception import ObservationStack
from src.core.qnet.kernel import conv2d, conv2d_input_grad, conv2d_weight_grad, patches, sigmoid
from src.core.qnet.params import QPolicyParams

HUBER_DELTA = 1.0


class ChannelMismatchError(Exception):
    def __init__(self, expected: int, found: int):
        super().__init__(f"Q-network expects {expected} input channels, got {found}.")


class ShapeMismatchError(Exception):
    def __init__(self, what: str, expected: tuple[int, ...], found: tuple[int, ...]):
        super().__init__(f"{what}: expected shape {expected}, got {found}.")


@dataclass
class _StepCache:
    cols_x: np.ndarray
    a: np.ndarray
    cols_a: np.ndarray
    h: np.ndarray
    cols_h: np.ndarray
    z: np.ndarray
    r: np.ndarray
    cols_rh: np.ndarray
    c: np.ndarray
    feat: np.ndarray


def _weights(params: QPolicyParams) -> dict[str, np.ndarray]:
    return {name: np.asarray(t, dtype=np.float64) for name, t in params.tensors.items()}


def initial_hidden(params: QPolicyParams, batch: int | None = None) -> np.ndarray:
    shape = (params.hidden, params.n, params.n)
    return np.zeros(shape if batch is None else (batch, *shape), dtype=np.float64)


def _check_input(params: QPolicyParams, x: np.ndarray) -> None:
    if x.shape[-3] != params.input_channels:
        raise ChannelMismatchError(params.input_channels, x.shape[-3])
    if x.shape[-2:] != (params.n, params.n):
        raise ShapeMismatchError("observation", (params.n, params.n), x.shape[-2:])


def _cell(w: dict[str, np.ndarray], x: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, _StepCache]:
    cols_x = patches(x)
    a = np.tanh(conv2d(cols_x, w["conv1_w"]) + w["conv1_b"][None, :, None, None])
    cols_a = patches(a)
    cols_h = patches(h)
    z = sigmoid(
        conv2d(cols_a, w["gru_wz"]) + conv2d(cols_h, w["gru_uz"]) + w["gru_bz"][None, :, None, None]
    )
    r = sigmoid(
        conv2d(cols_a, w["gru_wr"]) + conv2d(cols_h, w["gru_ur"]) + w["gru_br"][None, :, None, None]
    )
    cols_rh = patches(r * h)
    c = np.tanh(
        conv2d(cols_a, w["gru_wh"]) + conv2d(cols_rh, w["gru_uh"]) + w["gru_bh"][None, :, None, None]
    )
    h_new = (1.0 - z) * h + z * c
    feat = h_new.mean(axis=2)  # pool range rows, keep bearing columns
    return h_new, _StepCache(cols_x, a, cols_a, h, cols_h, z, r, cols_rh, c, feat)


def _head(w: dict[str, np.ndarray], feat: np.ndarray) -> np.ndarray:
    return feat.reshape(feat.shape[0], -1) @ w["head_w"].T + w["head_b"]


def forward(
    params: QPolicyParams,
    observation: ObservationStack | np.ndarray,
    hidden: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Q-values for one observation and the next hidden state."""
    if isinstance(observation, ObservationStack):
        x = observation.channels(params.input_channels)
    else:
        x = np.asarray(observation, dtype=np.float64)
    _check_input(params, x)
    w = _weights(params)
    if hidden is None or not params.variant.is_recurrent:
        h = initial_hidden(params, 1)
    else:
        if hidden.shape != (params.hidden, params.n, params.n):
            raise ShapeMismatchError(
                "hidden state", (params.hidden, params.n, params.n), hidden.shape
            )
        h = np.asarray(hidden, dtype=np.float64)[None]
    h_new, cache = _cell(w, x[None], h)
    q = _head(w, cache.feat)[0]
    if not params.variant.is_recurrent:
        return q, initial_hidden(params)
    return q, h_new[0]


def forward_sequence(
    params: QPolicyParams, xs: np.ndarray
) -> tuple[np.ndarray, list[_StepCache]]:
    """Q-values for a (T, B, C, n, n) batch of episodes from zero hidden state."""
    xs = np.asarray(xs, dtype=np.float64)
    _check_input(params, xs)
    w = _weights(params)
    steps, batch = xs.shape[:2]
    h = initial_hidden(params, batch)
    qs = np.empty((steps, batch, params.k), dtype=np.float64)
    caches = []
    for t in range(steps):
        if not params.variant.is_recurrent:
            h = initial_hidden(params, batch)
        h, cache = _cell(w, xs[t], h)
        qs[t] = _head(w, cache.feat)
        caches.append(cache)
    return qs, caches


def huber(error: np.ndarray, delta: float = HUBER_DELTA) -> np.ndarray:
    magnitude = np.abs(error)
    return np.where(magnitude <= delta, 0.5 * error**2, delta * (magnitude - 0.5 * delta))


def _check_targets(qs: np.ndarray, targets: np.ndarray, mask: np.ndarray) -> None:
    if targets.shape != qs.shape:
        raise ShapeMismatchError("targets", qs.shape, targets.shape)
    if mask.shape != qs.shape:
        raise ShapeMismatchError("mask", qs.shape, mask.shape)


def _step_weights(mask: np.ndarray) -> np.ndarray:
    """Per-step normaliser 1 / max(1, number of valid targets)."""
    return 1.0 / np.maximum(1.0, mask.sum(axis=(1, 2)))


def loss(params: QPolicyParams, xs: np.ndarray, targets: np.ndarray, mask: np.ndarray) -> float:
    """Masked Huber loss: per-step mean over valid (episode, action) targets, summed over steps."""
    qs, _ = forward_sequence(params, xs)
    mask = np.asarray(mask, dtype=np.float64)
    _check_targets(qs, np.asarray(targets), mask)
    targets = np.where(mask > 0, targets, 0.0)
    per_step = (mask * huber(qs - targets)).sum(axis=(1, 2))
    return float((per_step * _step_weights(mask)).sum())


def loss_and_gradients(
    params: QPolicyParams, xs: np.ndarray, targets: np.ndarray, mask: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Loss and its gradient with respect to every tensor (backpropagation through time)."""
    xs = np.asarray(xs, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    qs, caches = forward_sequence(params, xs)
    _check_targets(qs, np.asarray(targets), mask)
    targets = np.where(mask > 0, np.asarray(targets, dtype=np.float64), 0.0)

    error = qs - targets
    weights = _step_weights(mask)
    total = float(((mask * huber(error)).sum(axis=(1, 2)) * weights).sum())
    dqs = mask * np.clip(error, -HUBER_DELTA, HUBER_DELTA) * weights[:, None, None]

    w = _weights(params)
    grads = params.zeros_like()
    rows = params.n
    batch = xs.shape[1]
    dh_next = initial_hidden(params, batch)
    for t in reversed(range(len(caches))):
        s = caches[t]
        dq = dqs[t]
        grads["head_w"] += dq.T @ s.feat.reshape(batch, -1)
        grads["head_b"] += dq.sum(axis=0)
        dfeat = (dq @ w["head_w"]).reshape(s.feat.shape)
        dh = np.broadcast_to(dfeat[:, :, None, :] / rows, s.h.shape) + dh_next

        dz = dh * (s.c - s.h)
        dc = dh * s.z
        dh_prev = dh * (1.0 - s.z)

        dac = dc * (1.0 - s.c**2)
        grads["gru_wh"] += conv2d_weight_grad(s.cols_a, dac)
        grads["gru_uh"] += conv2d_weight_grad(s.cols_rh, dac)
        grads["gru_bh"] += dac.sum(axis=(0, 2, 3))
        da = conv2d_input_grad(dac, w["gru_wh"])
        drh = conv2d_input_grad(dac, w["gru_uh"])
        dr = drh * s.h
        dh_prev += drh * s.r

        for gate, dgate, value in (("z", dz, s.z), ("r", dr, s.r)):
            dpre = dgate * value * (1.0 - value)
            grads[f"gru_w{gate}"] += conv2d_weight_grad(s.cols_a, dpre)
            grads[f"gru_u{gate}"] += conv2d_weight_grad(s.cols_h, dpre)
            grads[f"gru_b{gate}"] += dpre.sum(axis=(0, 2, 3))
            da += conv2d_input_grad(dpre, w[f"gru_w{gate}"])
            dh_prev += conv2d_input_grad(dpre, w[f"gru_u{gate}"])

        da0 = da * (1.0 - s.a**2)
        grads["conv1_w"] += conv2d_weight_grad(s.cols_x, da0)
        grads["conv1_b"] += da0.sum(axis=(0, 2, 3))

        if params.variant.is_recurrent:
            dh_next = dh_prev
    return total, grads


def backward(
    params: QPolicyParams, xs: np.ndarray, targets: np.ndarray, mask: np.ndarray
) -> dict[str, np.ndarray]:
    return loss_and_gradients(params, xs, targets, mask)[1]
