import numpy as np

from ..errors import ShapeMismatch


class RMSProp:
    """cache <- rho*cache + (1-rho)*g^2 ;  p <- p - lr*g / (sqrt(cache) + eps)"""

    def __init__(self, lr=0.001, rho=0.9, eps=1e-7):
        self.lr = lr
        self.rho = rho
        self.eps = eps
        self.cache = {}

    def step(self, params, grads):
        for name, g in grads.items():
            p = params[name]
            if p.shape != g.shape:
                raise ShapeMismatch(f"{name}: param {p.shape} vs grad {g.shape}")
            c = self.cache.get(name)
            if c is None:
                c = self.cache[name] = np.zeros_like(p)
            c *= self.rho
            c += (1 - self.rho) * g * g
            p -= self.lr * g / (np.sqrt(c) + self.eps)
        return params


def rmsprop_step(params, grads, state):
    return state.step(params, grads)


def clip_global_norm(grads, max_norm=5.0):
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm:
        scale = max_norm / total
        for g in grads.values():
            g *= scale
    return total
