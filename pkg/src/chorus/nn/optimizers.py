"""The eight optimizer update rules, each mutating parameters in place.

Defaults: sgd lr 0.01; adam/nadam lr 0.001, beta1 0.9, beta2 0.999,
eps 1e-7, bias-corrected; adamax lr 0.001; rmsprop lr 0.001, rho 0.9;
adagrad lr 0.01; adadelta lr 1.0, rho 0.95; ftrl alpha 0.001 with
learning-rate power -0.5 and no regularization.
"""

from __future__ import annotations

import numpy as np

OPTIMIZER_KINDS = (
    "adadelta", "adagrad", "adam", "adamax", "ftrl", "nadam", "rmsprop", "sgd",
)

_EPS = 1e-7


class Optimizer:
    """Base class holding lazily initialized per-parameter state."""

    def __init__(self):
        self.state: dict[int, dict] = {}
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        for i, (p, g) in enumerate(zip(params, grads)):
            slot = self.state.setdefault(i, {})
            self._update(slot, p, np.asarray(g, dtype=p.dtype))

    def _update(self, slot, p, g):
        raise NotImplementedError


class SGD(Optimizer):
    def __init__(self, lr=0.01):
        super().__init__()
        self.lr = lr

    def _update(self, slot, p, g):
        p -= self.lr * g


class Adam(Optimizer):
    def __init__(self, lr=0.001, beta1=0.9, beta2=0.999, eps=_EPS):
        super().__init__()
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps

    def _update(self, slot, p, g):
        m = slot.setdefault("m", np.zeros_like(p))
        v = slot.setdefault("v", np.zeros_like(p))
        m += (1 - self.beta1) * (g - m)
        v += (1 - self.beta2) * (g * g - v)
        m_hat = m / (1 - self.beta1 ** self.t)
        v_hat = v / (1 - self.beta2 ** self.t)
        p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class Nadam(Adam):
    def _update(self, slot, p, g):
        m = slot.setdefault("m", np.zeros_like(p))
        v = slot.setdefault("v", np.zeros_like(p))
        m += (1 - self.beta1) * (g - m)
        v += (1 - self.beta2) * (g * g - v)
        m_hat = m / (1 - self.beta1 ** self.t)
        v_hat = v / (1 - self.beta2 ** self.t)
        nesterov = self.beta1 * m_hat + (1 - self.beta1) * g / (1 - self.beta1 ** self.t)
        p -= self.lr * nesterov / (np.sqrt(v_hat) + self.eps)


class Adamax(Optimizer):
    def __init__(self, lr=0.001, beta1=0.9, beta2=0.999, eps=_EPS):
        super().__init__()
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps

    def _update(self, slot, p, g):
        m = slot.setdefault("m", np.zeros_like(p))
        u = slot.setdefault("u", np.zeros_like(p))
        m += (1 - self.beta1) * (g - m)
        np.maximum(self.beta2 * u, np.abs(g), out=u)
        p -= (self.lr / (1 - self.beta1 ** self.t)) * m / (u + self.eps)


class RMSProp(Optimizer):
    def __init__(self, lr=0.001, rho=0.9, eps=_EPS):
        super().__init__()
        self.lr, self.rho, self.eps = lr, rho, eps

    def _update(self, slot, p, g):
        v = slot.setdefault("v", np.zeros_like(p))
        v += (1 - self.rho) * (g * g - v)
        p -= self.lr * g / (np.sqrt(v) + self.eps)


class Adagrad(Optimizer):
    def __init__(self, lr=0.01, eps=_EPS):
        super().__init__()
        self.lr, self.eps = lr, eps

    def _update(self, slot, p, g):
        acc = slot.setdefault("acc", np.zeros_like(p))
        acc += g * g
        p -= self.lr * g / (np.sqrt(acc) + self.eps)


class Adadelta(Optimizer):
    def __init__(self, lr=1.0, rho=0.95, eps=_EPS):
        super().__init__()
        self.lr, self.rho, self.eps = lr, rho, eps

    def _update(self, slot, p, g):
        acc_g = slot.setdefault("acc_g", np.zeros_like(p))
        acc_d = slot.setdefault("acc_d", np.zeros_like(p))
        acc_g += (1 - self.rho) * (g * g - acc_g)
        delta = np.sqrt(acc_d + self.eps) / np.sqrt(acc_g + self.eps) * g
        acc_d += (1 - self.rho) * (delta * delta - acc_d)
        p -= self.lr * delta


class Ftrl(Optimizer):
    """FTRL-Proximal with lambda1 = lambda2 = 0 and power -0.5.

    The linear term is warm-started from the incoming parameter values so
    that a zero gradient is a fixed point even on the first step.
    """

    def __init__(self, alpha=0.001, initial_accumulator=0.1):
        super().__init__()
        self.alpha = alpha
        self.n0 = initial_accumulator

    def _update(self, slot, p, g):
        if "n" not in slot:
            slot["n"] = np.full_like(p, self.n0)
            slot["z"] = -p * np.sqrt(slot["n"]) / self.alpha
        n, z = slot["n"], slot["z"]
        n_new = n + g * g
        sigma = (np.sqrt(n_new) - np.sqrt(n)) / self.alpha
        z += g - sigma * p
        n[...] = n_new
        p[...] = -self.alpha * z / np.sqrt(n)


_FACTORY = {
    "sgd": SGD,
    "adam": Adam,
    "nadam": Nadam,
    "adamax": Adamax,
    "rmsprop": RMSProp,
    "adagrad": Adagrad,
    "adadelta": Adadelta,
    "ftrl": Ftrl,
}


def make_optimizer(kind: str, **hyperparams) -> Optimizer:
    try:
        return _FACTORY[kind](**hyperparams)
    except KeyError:
        raise ValueError(f"unknown optimizer kind {kind!r}") from None


def optimizer_step(kind: str, state: Optimizer | None, params, grads, **hyperparams) -> Optimizer:
    """Single functional-style step; returns the (possibly new) state object."""
    if state is None:
        state = make_optimizer(kind, **hyperparams)
    state.step(params, grads)
    return state
