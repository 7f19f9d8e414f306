import numpy as np

from src.core.qnet.params import QPolicyParams


class Adam:
    """Adam with per-tensor moment estimates; updates return new float32 snapshots."""

    def __init__(
        self,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.steps = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, params: QPolicyParams, grads: dict[str, np.ndarray]) -> QPolicyParams:
        self.steps += 1
        correction1 = 1.0 - self.beta1**self.steps
        correction2 = 1.0 - self.beta2**self.steps
        updated = {}
        for name, tensor in params.tensors.items():
            g = grads[name]
            m = self._m.get(name, np.zeros_like(g))
            v = self._v.get(name, np.zeros_like(g))
            m = self.beta1 * m + (1.0 - self.beta1) * g
            v = self.beta2 * v + (1.0 - self.beta2) * g**2
            self._m[name], self._v[name] = m, v
            delta = self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)
            updated[name] = (tensor.astype(np.float64) - delta).astype(np.float32)
        return params.replace(updated)
