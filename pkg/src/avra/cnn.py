"""Small convolutional network with hand-derived gradients.

Architecture: three 3x3 conv layers (stride 1, zero-pad 1) each followed by
ReLU and 2x2 max pooling, then a hidden fully connected layer and a 4-way
output layer. Everything runs in float64 so finite-difference checks and
bitwise determinism hold. The output layer is zero-initialized, which pins
the initial softmax cross-entropy at exactly ln(4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import N_CLASSES, RegisterLabel, TARGET_HEIGHT, TARGET_WIDTH
from .errors import ConfigError, ShapeError, TrainingError


@dataclass(frozen=True)
class CnnConfig:
    conv_channels: tuple[int, int, int] = (4, 8, 16)
    kernel_size: int = 3
    fc_hidden: int = 64
    n_classes: int = N_CLASSES
    input_shape: tuple[int, int, int] = (1, TARGET_HEIGHT, TARGET_WIDTH)
    learning_rate: float = 0.004
    momentum: float = 0.9
    batch_size: int = 32
    epochs: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")


def _im2col(x, k, pad):
    """Unfold (c, b, h, w) into (c*k*k, b*out_h*out_w) patch columns.

    The channel-leading layout keeps every subsequent reshape a zero-copy
    view, which is where the training time goes otherwise.
    """
    c, b, h, w = x.shape
    out_h = h + 2 * pad - k + 1
    out_w = w + 2 * pad - k + 1
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    cols = np.empty((c, k, k, b, out_h, out_w))
    for i in range(k):
        for j in range(k):
            cols[:, i, j] = xp[:, :, i : i + out_h, j : j + out_w]
    return cols.reshape(c * k * k, b * out_h * out_w), out_h, out_w


def _col2im(dcols, x_shape, k, pad, out_h, out_w):
    c, b, h, w = x_shape
    dxp = np.zeros((c, b, h + 2 * pad, w + 2 * pad))
    blocks = dcols.reshape(c, k, k, b, out_h, out_w)
    for i in range(k):
        for j in range(k):
            dxp[:, :, i : i + out_h, j : j + out_w] += blocks[:, i, j]
    return dxp[:, :, pad : pad + h, pad : pad + w]


def conv2d_forward(x, kernel, bias, stride: int = 1, pad: int = 1):
    """Cross-correlation of (b, c, h, w) input with (out_c, c, k, k) kernels."""
    if stride != 1:
        raise ValueError("only stride 1 is implemented")
    b, c, h, w = x.shape
    out_c, in_c, k, k2 = kernel.shape
    if k != k2 or in_c != c or bias.shape != (out_c,):
        raise ShapeError(f"inconsistent conv shapes {x.shape} / {kernel.shape} / {bias.shape}")
    flat, out_h, out_w = _im2col(np.ascontiguousarray(x.transpose(1, 0, 2, 3)), k, pad)
    out = (kernel.reshape(out_c, -1) @ flat).reshape(out_c, b, out_h, out_w)
    return out.transpose(1, 0, 2, 3) + bias[None, :, None, None], flat


class Conv2d:
    """3x3 convolution working on channel-leading (c, b, h, w) activations."""

    def __init__(self, in_channels, out_channels, kernel_size=3, pad=1, rng=None):
        self.pad = pad
        fan_in = in_channels * kernel_size * kernel_size
        scale = np.sqrt(2.0 / fan_in)
        rng = rng or np.random.default_rng(0)
        self.weight = rng.normal(0.0, scale, (out_channels, in_channels, kernel_size, kernel_size))
        self.bias = np.zeros(out_channels)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._cache = None

    def forward(self, x):
        c, b, h, w = x.shape
        out_c = self.weight.shape[0]
        if c != self.weight.shape[1]:
            raise ShapeError(f"expected {self.weight.shape[1]} channels, got {c}")
        flat, out_h, out_w = _im2col(x, self.weight.shape[2], self.pad)
        out = (self.weight.reshape(out_c, -1) @ flat).reshape(out_c, b, out_h, out_w)
        out += self.bias[:, None, None, None]
        self._cache = (x.shape, flat, (out_h, out_w))
        return out

    def backward(self, dout):
        x_shape, flat, (out_h, out_w) = self._cache
        out_c = self.weight.shape[0]
        k = self.weight.shape[2]
        dout_flat = dout.reshape(out_c, -1)
        self.grad_weight = (dout_flat @ flat.T).reshape(self.weight.shape)
        self.grad_bias = dout.sum(axis=(1, 2, 3))
        dcols = self.weight.reshape(out_c, -1).T @ dout_flat
        return _col2im(dcols, x_shape, k, self.pad, out_h, out_w)

    def params(self):
        return [("weight", self), ("bias", self)]


def maxpool2d(x):
    """2x2 stride-2 max pooling over the last two axes; odd trailing
    rows/columns are dropped.

    Returns (pooled, argmax) with argmax in 0..3 indexing the window cell,
    first occurrence winning ties.
    """
    b, c, h, w = x.shape
    if h < 2 or w < 2:
        raise ValueError("spatial dims must be >= 2 for 2x2 pooling")
    h2, w2 = h // 2, w // 2
    windows = (
        x[:, :, : h2 * 2, : w2 * 2]
        .reshape(b, c, h2, 2, w2, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(b, c, h2, w2, 4)
    )
    arg = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, arg[..., None], axis=-1)[..., 0]
    return out, arg


class MaxPool2x2:
    def __init__(self):
        self._cache = None

    def forward(self, x):
        out, arg = maxpool2d(x)
        self._cache = (x.shape, arg)
        return out

    def backward(self, dout):
        x_shape, arg = self._cache
        b, c, h, w = x_shape
        h2, w2 = h // 2, w // 2
        dwin = np.zeros((b, c, h2, w2, 4))
        np.put_along_axis(dwin, arg[..., None], dout[..., None], axis=-1)
        dx = np.zeros(x_shape)
        dx[:, :, : h2 * 2, : w2 * 2] = (
            dwin.reshape(b, c, h2, w2, 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(b, c, h2 * 2, w2 * 2)
        )
        return dx

    def params(self):
        return []


def relu(x):
    return np.maximum(0.0, x)


class Relu:
    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dout):
        return np.where(self._mask, dout, 0.0)

    def params(self):
        return []


class Flatten:
    """(c, b, h, w) feature maps -> (b, c*h*w) rows for the dense layers."""

    def __init__(self):
        self._shape = None

    def forward(self, x):
        self._shape = x.shape
        return np.ascontiguousarray(x.transpose(1, 0, 2, 3)).reshape(x.shape[1], -1)

    def backward(self, dout):
        c, b, h, w = self._shape
        return np.ascontiguousarray(dout.reshape(b, c, h, w).transpose(1, 0, 2, 3))

    def params(self):
        return []


class Linear:
    def __init__(self, in_features, out_features, rng=None, zero_init=False):
        if zero_init:
            self.weight = np.zeros((out_features, in_features))
        else:
            rng = rng or np.random.default_rng(0)
            self.weight = rng.normal(0.0, np.sqrt(2.0 / in_features), (out_features, in_features))
        self.bias = np.zeros(out_features)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)
        self._x = None

    def forward(self, x):
        if x.shape[1] != self.weight.shape[1]:
            raise ShapeError(f"expected {self.weight.shape[1]} inputs, got {x.shape[1]}")
        self._x = x
        return x @ self.weight.T + self.bias

    def backward(self, dout):
        self.grad_weight = dout.T @ self._x
        self.grad_bias = dout.sum(axis=0)
        return dout @ self.weight

    def params(self):
        return [("weight", self), ("bias", self)]


def loss_softmax_ce(logits, labels):
    """Mean softmax cross-entropy and its gradient w.r.t. the logits."""
    labels = np.asarray([int(l) for l in labels])
    if logits.ndim != 2 or len(labels) != logits.shape[0]:
        raise ShapeError("logits must be (batch, classes) aligned with labels")
    if np.any(labels < 0) or np.any(labels >= logits.shape[1]):
        raise ValueError("label out of range")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    n = logits.shape[0]
    loss = float(-log_probs[np.arange(n), labels].mean())
    grad = np.exp(log_probs)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    train_loss_min: float
    train_loss_max: float
    val_loss: float
    val_accuracy: float


class CnnModel:
    """Parameter container; build with `CnnModel(cfg)` then `train`."""

    def __init__(self, cfg: CnnConfig = CnnConfig()):
        self.cfg = cfg
        rng = np.random.default_rng(cfg.seed)
        in_c, h, w = cfg.input_shape
        c1, c2, c3 = cfg.conv_channels
        k = cfg.kernel_size
        self.layers = [
            Conv2d(in_c, c1, k, pad=k // 2, rng=rng),
            Relu(),
            MaxPool2x2(),
            Conv2d(c1, c2, k, pad=k // 2, rng=rng),
            Relu(),
            MaxPool2x2(),
            Conv2d(c2, c3, k, pad=k // 2, rng=rng),
            Relu(),
            MaxPool2x2(),
            Flatten(),
        ]
        for _ in range(3):
            h, w = h // 2, w // 2
        self.feature_size = c3 * h * w
        self.layers.append(Linear(self.feature_size, cfg.fc_hidden, rng=rng))
        self.layers.append(Relu())
        self.layers.append(Linear(cfg.fc_hidden, cfg.n_classes, zero_init=True))

    def param_layers(self):
        return [layer for layer in self.layers if isinstance(layer, (Conv2d, Linear))]

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 3:
            x = x[None]
        if x.shape[1:] != self.cfg.input_shape:
            raise ShapeError(f"expected input {self.cfg.input_shape}, got {x.shape[1:]}")
        x = x.transpose(1, 0, 2, 3)  # internal channel-leading layout
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dlogits: np.ndarray) -> np.ndarray:
        grad = dlogits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad


def predict_proba(model: CnnModel, x: np.ndarray) -> np.ndarray:
    logits = model.forward(x)
    shifted = logits - logits.max(axis=1, keepdims=True)
    probs = np.exp(shifted)
    probs /= probs.sum(axis=1, keepdims=True)
    return probs[0] if np.asarray(x).ndim == 3 else probs


def predict(model: CnnModel, x: np.ndarray):
    logits = model.forward(x)
    if np.asarray(x).ndim == 3:
        return RegisterLabel(int(np.argmax(logits[0])))
    return np.argmax(logits, axis=1)


def evaluate_loss(model: CnnModel, images, labels, batch_size: int = 64):
    """Mean loss and accuracy without touching gradients."""
    losses, correct = [], 0
    for start in range(0, len(images), batch_size):
        batch = images[start : start + batch_size]
        batch_labels = labels[start : start + batch_size]
        logits = model.forward(batch)
        loss, _ = loss_softmax_ce(logits, batch_labels)
        losses.append(loss * len(batch))
        correct += int(np.sum(np.argmax(logits, axis=1) == batch_labels))
    return float(np.sum(losses) / len(images)), correct / len(images)


def train(
    model: CnnModel,
    train_images: np.ndarray,
    train_labels: np.ndarray,
    val_images: np.ndarray,
    val_labels: np.ndarray,
    cfg: CnnConfig | None = None,
) -> list[EpochStats]:
    """Mini-batch SGD with momentum over seeded shuffles.

    Returns one EpochStats per epoch (mean/min/max of the per-batch training
    losses plus validation loss and accuracy).
    """
    cfg = cfg or model.cfg
    if len(train_images) == 0 or len(val_images) == 0:
        raise TrainingError("training and validation sets must be nonempty")
    train_labels = np.asarray([int(l) for l in train_labels])
    val_labels = np.asarray([int(l) for l in val_labels])

    velocities = []
    for layer in model.param_layers():
        velocities.append((np.zeros_like(layer.weight), np.zeros_like(layer.bias)))

    rng = np.random.default_rng(cfg.seed)
    stats: list[EpochStats] = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_images))
        batch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            rows = order[start : start + cfg.batch_size]
            logits = model.forward(train_images[rows])
            loss, dlogits = loss_softmax_ce(logits, train_labels[rows])
            if not np.isfinite(loss):
                raise TrainingError(f"training diverged (non-finite loss) at epoch {epoch}")
            batch_losses.append(loss)
            model.backward(dlogits)
            for layer, (vel_w, vel_b) in zip(model.param_layers(), velocities):
                vel_w *= cfg.momentum
                vel_w -= cfg.learning_rate * layer.grad_weight
                layer.weight += vel_w
                vel_b *= cfg.momentum
                vel_b -= cfg.learning_rate * layer.grad_bias
                layer.bias += vel_b
        val_loss, val_acc = evaluate_loss(model, val_images, val_labels)
        stats.append(
            EpochStats(
                epoch=epoch,
                train_loss=float(np.mean(batch_losses)),
                train_loss_min=float(np.min(batch_losses)),
                train_loss_max=float(np.max(batch_losses)),
                val_loss=val_loss,
                val_accuracy=val_acc,
            )
        )
    return stats
