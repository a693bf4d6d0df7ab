"""Feedforward softmax classifier: forward pass, backprop, training loop.

Pixels are scaled to [0, 1] before entering the network. Training runs in
float32; a float64 path exists for gradient checking. Hidden layers share
one activation kind; the output layer is always softmax over 10 classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import ACTIVATION_KINDS, activation, activation_backward, softmax
from .optimizers import OPTIMIZER_KINDS, make_optimizer

BATCH_SIZES = (32, 64, 128, 256, 512)
PROB_FLOOR = 1e-12


class TrainingDiverged(RuntimeError):
    """Training loss became non-finite."""


@dataclass(frozen=True)
class Architecture:
    hidden_layers: int = 1
    activation: str = "relu"
    dropout: bool = False
    dropout_rate: float = 0.5
    input_dim: int = 784
    hidden_width: int = 128
    output_dim: int = 10

    def __post_init__(self):
        if self.hidden_layers not in (1, 2, 3):
            raise ValueError(f"hidden_layers must be 1..3, got {self.hidden_layers}")
        if self.activation not in ACTIVATION_KINDS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")

    @property
    def layer_dims(self) -> list[tuple[int, int]]:
        dims = [self.input_dim] + [self.hidden_width] * self.hidden_layers + [self.output_dim]
        return list(zip(dims[:-1], dims[1:]))


@dataclass(frozen=True)
class TrainingPlan:
    batch_size: int = 128
    optimizer: str = "adam"
    use_validation: bool = True
    validation_fraction: float = 0.1
    patience: int = 5
    max_epochs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.batch_size not in BATCH_SIZES:
            raise ValueError(f"batch_size must be one of {BATCH_SIZES}")
        if self.optimizer not in OPTIMIZER_KINDS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if not 0.0 < self.validation_fraction <= 0.5:
            raise ValueError("validation_fraction must lie in (0, 0.5]")


@dataclass
class TrainedModel:
    architecture: Architecture
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    train_loss_history: list[float] = field(default_factory=list)
    val_loss_history: list[float] = field(default_factory=list)
    epochs_trained: int = 0

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out


def init_model(arch: Architecture, rng: np.random.Generator, dtype=np.float32) -> TrainedModel:
    """Glorot-uniform weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in arch.layer_dims:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return TrainedModel(architecture=arch, weights=weights, biases=biases)


def _scale(batch: np.ndarray, dtype) -> np.ndarray:
    x = np.asarray(batch)
    if x.ndim == 3:
        x = x.reshape(len(x), -1)
    return x.astype(dtype) / (255.0 if x.dtype == np.uint8 else 1.0)


def _forward_cached(model: TrainedModel, x: np.ndarray, train_mode: bool,
                    rng: np.random.Generator | None):
    """Run the network, keeping pre-activations and dropout masks for backprop."""
    arch = model.architecture
    pre, post, masks = [], [x], []
    h = x
    for layer in range(len(model.weights)):
        z = h @ model.weights[layer] + model.biases[layer]
        pre.append(z)
        last = layer == len(model.weights) - 1
        if last:
            h = softmax(z)
        else:
            h = activation(arch.activation, z)
            if train_mode and arch.dropout:
                keep = 1.0 - arch.dropout_rate
                mask = (rng.random(h.shape) < keep).astype(h.dtype) / keep
                h = h * mask
                masks.append(mask)
            else:
                masks.append(None)
        post.append(h)
    return h, pre, post, masks


def forward(model: TrainedModel, batch: np.ndarray, train_mode: bool = False,
            rng: np.random.Generator | None = None, dtype=np.float32) -> np.ndarray:
    """Class-probability matrix for a batch of images (uint8 or prescaled)."""
    x = _scale(batch, dtype)
    if x.shape[1] != model.architecture.input_dim:
        raise ValueError(f"expected {model.architecture.input_dim} features, got {x.shape[1]}")
    if train_mode and model.architecture.dropout and rng is None:
        rng = np.random.default_rng(0)
    probs, *_ = _forward_cached(model, x, train_mode, rng)
    return probs


def loss_and_gradients(model: TrainedModel, batch: np.ndarray, labels: np.ndarray,
                       train_mode: bool = False, rng: np.random.Generator | None = None,
                       dtype=np.float32):
    """Mean cross-entropy over the batch plus gradients for every parameter.

    Returns (loss, grads) with grads ordered [W0, b0, W1, b1, ...].
    """
    x = _scale(batch, dtype)
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() > 9:
        raise ValueError("labels must lie in [0, 9]")
    probs, pre, post, masks = _forward_cached(model, x, train_mode, rng)
    n = len(x)
    picked = np.maximum(probs[np.arange(n), labels], PROB_FLOOR)
    loss = float(-np.log(picked).mean())

    # softmax + cross-entropy collapse to (p - y) / n at the output logits
    delta = probs.copy()
    delta[np.arange(n), labels] -= 1.0
    delta /= n

    grads: list[np.ndarray] = []
    arch = model.architecture
    for layer in reversed(range(len(model.weights))):
        h_in = post[layer]
        grads.append(delta.sum(axis=0))          # bias
        grads.append(h_in.T @ delta)             # weights
        if layer > 0:
            delta = delta @ model.weights[layer].T
            mask = masks[layer - 1]
            if mask is not None:
                delta = delta * mask
            delta = activation_backward(arch.activation, pre[layer - 1], delta)
    grads.reverse()
    return loss, grads


def train(arch: Architecture, plan: TrainingPlan, images: np.ndarray,
          labels: np.ndarray) -> TrainedModel:
    """Mini-batch training with optional validation-based early stopping.

    With validation on, a seeded holdout is split off first, training stops
    after `patience` epochs without validation-loss improvement, and the
    best-validation weights are restored. Without validation, training runs
    for exactly max_epochs.
    """
    n = len(images)
    if n == 0:
        raise ValueError("empty dataset")
    seq = np.random.SeedSequence(plan.seed)
    init_rng, split_rng, shuffle_rng, dropout_rng = (
        np.random.default_rng(s) for s in seq.spawn(4)
    )
    x = _scale(images, np.float32)
    y = np.asarray(labels)

    if plan.use_validation:
        n_val = max(1, int(np.floor(plan.validation_fraction * n + 0.5)))
        perm = split_rng.permutation(n)
        val_idx, train_idx = perm[:n_val], perm[n_val:]
        if len(train_idx) == 0:
            raise ValueError("validation split leaves zero training rows")
        x_val, y_val = x[val_idx], y[val_idx]
        x_tr, y_tr = x[train_idx], y[train_idx]
    else:
        x_tr, y_tr = x, y
        x_val = y_val = None

    model = init_model(arch, init_rng)
    optimizer = make_optimizer(plan.optimizer)
    params = model.params()

    best_val = np.inf
    best_weights = None
    stale = 0
    for epoch in range(plan.max_epochs):
        order = shuffle_rng.permutation(len(x_tr))
        epoch_losses = []
        for start in range(0, len(x_tr), plan.batch_size):
            idx = order[start:start + plan.batch_size]
            loss, grads = loss_and_gradients(
                model, x_tr[idx], y_tr[idx], train_mode=True, rng=dropout_rng
            )
            if not np.isfinite(loss):
                raise TrainingDiverged(f"non-finite loss at epoch {epoch}")
            optimizer.step(params, grads)
            epoch_losses.append(loss)
        model.train_loss_history.append(float(np.mean(epoch_losses)))
        model.epochs_trained = epoch + 1

        if plan.use_validation:
            val_loss = _mean_loss(model, x_val, y_val)
            model.val_loss_history.append(val_loss)
            if val_loss < best_val:
                best_val = val_loss
                best_weights = ([w.copy() for w in model.weights],
                                [b.copy() for b in model.biases])
                stale = 0
            else:
                stale += 1
                if stale >= plan.patience:
                    break

    if best_weights is not None:
        model.weights, model.biases = best_weights
    return model


def _mean_loss(model: TrainedModel, x: np.ndarray, y: np.ndarray,
               chunk: int = 4096) -> float:
    total, count = 0.0, 0
    for start in range(0, len(x), chunk):
        probs = forward(model, x[start:start + chunk])
        picked = np.maximum(probs[np.arange(len(probs)), y[start:start + chunk]], PROB_FLOOR)
        total += float(-np.log(picked).sum())
        count += len(probs)
    return total / count


def evaluate(model: TrainedModel, images: np.ndarray, labels: np.ndarray | None = None,
             chunk: int = 4096):
    """Predicted label and confidence per sample, plus accuracy when labels given.

    Ties at the argmax resolve to the lowest class index; confidence is the
    winning softmax probability. Returns (accuracy, predictions, confidences);
    accuracy is None when no labels are supplied.
    """
    if hasattr(images, "images") and labels is None:  # LabeledSet convenience
        images, labels = images.images, images.labels
    preds = np.empty(len(images), dtype=np.uint8)
    confs = np.empty(len(images), dtype=np.float32)
    for start in range(0, len(images), chunk):
        probs = forward(model, images[start:start + chunk])
        preds[start:start + len(probs)] = probs.argmax(axis=1)
        confs[start:start + len(probs)] = probs.max(axis=1)
    accuracy = None
    if labels is not None:
        accuracy = float((preds == np.asarray(labels)).mean())
    return accuracy, preds, confs
