"""First-order adaptive optimizers used by the trainable heads.

Plain Adam (beta1=0.9, beta2=0.999, eps=1e-8) and its decoupled
weight-decay variant. Parameters are updated in place; everything is
float64 and single-threaded, so a fixed seed gives bitwise-identical
trajectories.
"""

from __future__ import annotations

import numpy as np


class Adam:
    def __init__(
        self,
        params: list[np.ndarray],
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.t = 0
        self._m = [np.zeros_like(p) for p in params]
        self._v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(g)
            update = (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            if self.weight_decay:
                # decoupled decay: applied to the parameter, not the gradient
                p -= self.lr * self.weight_decay * p
            p -= self.lr * update


def adamw(params: list[np.ndarray], lr: float, weight_decay: float = 0.01) -> Adam:
    return Adam(params, lr=lr, weight_decay=weight_decay)
