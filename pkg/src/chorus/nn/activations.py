"""The ten hidden-activation kinds and their backward rules.

All are elementwise except softmax, which normalizes each row with
max-subtraction and needs the full per-row Jacobian on the way back.
"""

from __future__ import annotations

import numpy as np

_GELU_K = 0.7978845608028654  # sqrt(2/pi)
_GELU_C = 0.044715

ACTIVATION_KINDS = (
    "elu", "exponential", "gelu", "hard_sigmoid", "linear",
    "relu", "sigmoid", "softmax", "swish", "tanh",
)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


def activation(kind: str, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if kind == "elu":
        return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))
    if kind == "exponential":
        return np.exp(x)
    if kind == "gelu":
        inner = _GELU_K * (x + _GELU_C * x ** 3)
        return 0.5 * x * (1.0 + np.tanh(inner))
    if kind == "hard_sigmoid":
        return np.clip(0.2 * x + 0.5, 0.0, 1.0)
    if kind == "linear":
        return x.copy()
    if kind == "relu":
        return np.maximum(x, 0.0)
    if kind == "sigmoid":
        return _sigmoid(x)
    if kind == "softmax":
        return softmax(x)
    if kind == "swish":
        return x * _sigmoid(x)
    if kind == "tanh":
        return np.tanh(x)
    raise ValueError(f"unknown activation kind {kind!r}")


def activation_backward(kind: str, x: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. pre-activation x, given the gradient at the output."""
    if kind == "softmax":
        s = softmax(x)
        return s * (grad_out - np.sum(grad_out * s, axis=-1, keepdims=True))
    return grad_out * _derivative(kind, x)


def _derivative(kind: str, x: np.ndarray) -> np.ndarray:
    if kind == "elu":
        return np.where(x > 0, 1.0, np.exp(np.minimum(x, 0.0)))
    if kind == "exponential":
        return np.exp(x)
    if kind == "gelu":
        inner = _GELU_K * (x + _GELU_C * x ** 3)
        t = np.tanh(inner)
        return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t ** 2) * _GELU_K * (1.0 + 3.0 * _GELU_C * x ** 2)
    if kind == "hard_sigmoid":
        return np.where((x > -2.5) & (x < 2.5), 0.2, 0.0)
    if kind == "linear":
        return np.ones_like(x)
    if kind == "relu":
        return (x > 0).astype(x.dtype)
    if kind == "sigmoid":
        s = _sigmoid(x)
        return s * (1.0 - s)
    if kind == "swish":
        s = _sigmoid(x)
        return s + x * s * (1.0 - s)
    if kind == "tanh":
        return 1.0 - np.tanh(x) ** 2
    raise ValueError(f"unknown activation kind {kind!r}")
