"""Binary model container shared by both classifiers.

Layout (all integers little-endian):

    magic    4 bytes  b"AVRA"
    version  u16      currently 1
    type     u16      1 = linear SVM, 2 = CNN

SVM payload: feature_dim u32, n_classes u32, then per class the weight
vector (feature_dim f64), bias f64, sigmoid slope f64, sigmoid offset f64.

CNN payload: a fixed config block (channels, kernel, fc width, classes,
input shape as u32s; learning rate and momentum as f64; batch u32,
epochs u32, seed i64), a layer manifest (count u32, then per layer:
kind u16 (1=conv, 2=linear), weight rank u16, weight dims u32..., bias
length u32), then all parameters as f64 in declaration order.

Round-trips are bit-exact; any mismatch raises ModelFormatError.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .cnn import CnnConfig, CnnModel, Conv2d
from .errors import ModelFormatError
from .svm import SvmModel

MAGIC = b"AVRA"
VERSION = 1
TAG_SVM = 1
TAG_CNN = 2

_KIND_CONV = 1
_KIND_LINEAR = 2


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError("model file truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def floats(self, count: int) -> np.ndarray:
        raw = self.take(count * 8)
        return np.frombuffer(raw, dtype="<f8").copy()

    def done(self):
        if self.pos != len(self.data):
            raise ModelFormatError(f"{len(self.data) - self.pos} trailing bytes in model file")


def _header(tag: int) -> bytes:
    return MAGIC + struct.pack("<HH", VERSION, tag)


def _read_header(reader: _Reader) -> int:
    if reader.take(4) != MAGIC:
        raise ModelFormatError("bad magic: not an AVRA model file")
    version, tag = reader.unpack("<HH")
    if version != VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    return tag


def save_svm(model: SvmModel, path: str | Path) -> None:
    parts = [_header(TAG_SVM), struct.pack("<II", model.feature_dim, model.weights.shape[0])]
    for c in range(model.weights.shape[0]):
        parts.append(model.weights[c].astype("<f8").tobytes())
        parts.append(
            struct.pack(
                "<ddd", float(model.biases[c]), float(model.calib_a[c]), float(model.calib_b[c])
            )
        )
    Path(path).write_bytes(b"".join(parts))


def _load_svm_payload(reader: _Reader) -> SvmModel:
    feature_dim, n_classes = reader.unpack("<II")
    weights = np.empty((n_classes, feature_dim))
    biases, calib_a, calib_b = np.empty(n_classes), np.empty(n_classes), np.empty(n_classes)
    for c in range(n_classes):
        weights[c] = reader.floats(feature_dim)
        biases[c], calib_a[c], calib_b[c] = reader.unpack("<ddd")
    reader.done()
    return SvmModel(weights=weights, biases=biases, calib_a=calib_a, calib_b=calib_b)


def save_cnn(model: CnnModel, path: str | Path) -> None:
    cfg = model.cfg
    parts = [
        _header(TAG_CNN),
        struct.pack(
            "<6I", *cfg.conv_channels, cfg.kernel_size, cfg.fc_hidden, cfg.n_classes
        ),
        struct.pack("<3I", *cfg.input_shape),
        struct.pack("<ddIIq", cfg.learning_rate, cfg.momentum, cfg.batch_size, cfg.epochs, cfg.seed),
    ]
    layers = model.param_layers()
    manifest = [struct.pack("<I", len(layers))]
    params = []
    for layer in layers:
        kind = _KIND_CONV if isinstance(layer, Conv2d) else _KIND_LINEAR
        dims = layer.weight.shape
        manifest.append(struct.pack(f"<HH{len(dims)}II", kind, len(dims), *dims, layer.bias.size))
        params.append(layer.weight.astype("<f8").tobytes())
        params.append(layer.bias.astype("<f8").tobytes())
    Path(path).write_bytes(b"".join(parts + manifest + params))


def _load_cnn_payload(reader: _Reader) -> CnnModel:
    c1, c2, c3, kernel, fc_hidden, n_classes = reader.unpack("<6I")
    in_shape = reader.unpack("<3I")
    lr, momentum, batch, epochs, seed = reader.unpack("<ddIIq")
    cfg = CnnConfig(
        conv_channels=(c1, c2, c3),
        kernel_size=kernel,
        fc_hidden=fc_hidden,
        n_classes=n_classes,
        input_shape=in_shape,
        learning_rate=lr,
        momentum=momentum,
        batch_size=batch,
        epochs=epochs,
        seed=seed,
    )
    model = CnnModel(cfg)
    (n_layers,) = reader.unpack("<I")
    layers = model.param_layers()
    if n_layers != len(layers):
        raise ModelFormatError(f"layer manifest lists {n_layers} layers, expected {len(layers)}")
    specs = []
    for layer in layers:
        kind, rank = reader.unpack("<HH")
        dims = reader.unpack(f"<{rank}I")
        (bias_len,) = reader.unpack("<I")
        expected_kind = _KIND_CONV if isinstance(layer, Conv2d) else _KIND_LINEAR
        if kind != expected_kind or dims != layer.weight.shape or bias_len != layer.bias.size:
            raise ModelFormatError(
                f"layer manifest mismatch: kind={kind} dims={dims} vs {layer.weight.shape}"
            )
        specs.append((layer, dims, bias_len))
    for layer, dims, bias_len in specs:
        layer.weight = reader.floats(int(np.prod(dims))).reshape(dims)
        layer.bias = reader.floats(bias_len)
    reader.done()
    return model


def load_model(path: str | Path) -> SvmModel | CnnModel:
    """Load either model kind, dispatching on the type tag."""
    reader = _Reader(Path(path).read_bytes())
    tag = _read_header(reader)
    if tag == TAG_SVM:
        return _load_svm_payload(reader)
    if tag == TAG_CNN:
        return _load_cnn_payload(reader)
    raise ModelFormatError(f"unknown model type tag {tag}")


def load_svm(path: str | Path) -> SvmModel:
    model = load_model(path)
    if not isinstance(model, SvmModel):
        raise ModelFormatError("expected an SVM model file (type tag 1)")
    return model


def load_cnn(path: str | Path) -> CnnModel:
    model = load_model(path)
    if not isinstance(model, CnnModel):
        raise ModelFormatError("expected a CNN model file (type tag 2)")
    return model
