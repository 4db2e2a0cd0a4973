"""Image standardization, augmentation, feature flattening, and dataset plumbing.

Model input is a 154-wide by 128-high grayscale image; flattened feature
vectors therefore have 154 * 128 = 19712 dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .dsp import SpectrogramImage
from .errors import ShapeError

TARGET_WIDTH = 154
TARGET_HEIGHT = 128
FEATURE_DIM = TARGET_WIDTH * TARGET_HEIGHT  # 19712

BRIGHTNESS_FACTORS = (1.0, 0.8, 1.2)


class RegisterLabel(IntEnum):
    CHEST = 0
    MIX = 1
    HEAD_MIX = 2
    HEAD = 3

    @property
    def display_name(self) -> str:
        return {0: "Chest", 1: "Mix", 2: "HeadMix", 3: "Head"}[self.value]


N_CLASSES = len(RegisterLabel)


@dataclass(frozen=True)
class Sample:
    features: np.ndarray  # length FEATURE_DIM, values in [0, 1]
    label: RegisterLabel

    def __post_init__(self):
        if self.features.shape != (FEATURE_DIM,):
            raise ShapeError(f"expected {FEATURE_DIM} features, got {self.features.shape}")


@dataclass(frozen=True)
class DatasetManifest:
    """Ordered (relative image path, label) pairs plus the split seed."""

    entries: tuple[tuple[str, RegisterLabel], ...]
    split_seed: int = 0

    def __post_init__(self):
        paths = [p for p, _ in self.entries]
        if len(set(paths)) != len(paths):
            raise ValueError("manifest paths must be unique")

    def labels(self) -> list[RegisterLabel]:
        return [label for _, label in self.entries]


def _resize_bilinear(pixels: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Corner-aligned bilinear resampling."""
    in_h, in_w = pixels.shape

    def coords(n_out, n_in):
        if n_out == 1:
            return np.array([(n_in - 1) / 2.0])
        return np.arange(n_out) * (n_in - 1) / (n_out - 1)

    ys, xs = coords(out_h, in_h), coords(out_w, in_w)
    y0 = np.clip(np.floor(ys).astype(int), 0, in_h - 1)
    x0 = np.clip(np.floor(xs).astype(int), 0, in_w - 1)
    y1, x1 = np.minimum(y0 + 1, in_h - 1), np.minimum(x0 + 1, in_w - 1)
    wy, wx = ys - y0, xs - x0

    top = pixels[y0[:, None], x0] * (1 - wx) + pixels[y0[:, None], x1] * wx
    bottom = pixels[y1[:, None], x0] * (1 - wx) + pixels[y1[:, None], x1] * wx
    return top * (1 - wy)[:, None] + bottom * wy[:, None]


def standardize(img: SpectrogramImage) -> SpectrogramImage:
    """Aspect-preserving bilinear resize into 154x128, then symmetric zero-pad.

    Images already at 154x128 pass through unchanged, which makes the
    operation idempotent. Odd padding puts the extra pixel on the
    bottom/right.
    """
    h, w = img.pixels.shape
    if h == 0 or w == 0:
        raise ValueError("cannot standardize an empty image")
    if (h, w) == (TARGET_HEIGHT, TARGET_WIDTH):
        return img
    scale = min(TARGET_WIDTH / w, TARGET_HEIGHT / h)
    new_w = min(TARGET_WIDTH, max(1, int(round(w * scale))))
    new_h = min(TARGET_HEIGHT, max(1, int(round(h * scale))))
    resized = _resize_bilinear(img.pixels, new_h, new_w)
    pad_top = (TARGET_HEIGHT - new_h) // 2
    pad_left = (TARGET_WIDTH - new_w) // 2
    out = np.zeros((TARGET_HEIGHT, TARGET_WIDTH))
    out[pad_top : pad_top + new_h, pad_left : pad_left + new_w] = resized
    return SpectrogramImage(out)


def hflip(img: SpectrogramImage) -> SpectrogramImage:
    """Mirror time: column j maps to column width-1-j."""
    return SpectrogramImage(img.pixels[:, ::-1].copy())


def brightness(img: SpectrogramImage, factor: float) -> SpectrogramImage:
    """Scale intensities by factor, clamping at 1."""
    if factor <= 0:
        raise ValueError("brightness factor must be positive")
    return SpectrogramImage(np.minimum(1.0, img.pixels * factor))


def augment(img: SpectrogramImage) -> list[SpectrogramImage]:
    """The six training variants: {original, hflip} x brightness {1.0, 0.8, 1.2}.

    Order: original at each brightness first, then the flipped image at each
    brightness; output[0] is the unmodified input.
    """
    out = []
    for base in (img, hflip(img)):
        for factor in BRIGHTNESS_FACTORS:
            out.append(brightness(base, factor))
    return out


def flatten(img: SpectrogramImage) -> np.ndarray:
    """Row-major flattening of a standardized image into 19712 features."""
    if img.pixels.shape != (TARGET_HEIGHT, TARGET_WIDTH):
        raise ShapeError(
            f"expected {TARGET_HEIGHT}x{TARGET_WIDTH} image, got {img.pixels.shape}"
        )
    return img.pixels.reshape(-1).copy()


def reshape(features: np.ndarray) -> SpectrogramImage:
    """Inverse of flatten."""
    if features.shape != (FEATURE_DIM,):
        raise ShapeError(f"expected {FEATURE_DIM} features, got {features.shape}")
    return SpectrogramImage(features.reshape(TARGET_HEIGHT, TARGET_WIDTH).copy())


def split_train_test(
    items: list, labels: list[RegisterLabel], train_fraction: float = 0.8, seed: int = 0
) -> tuple[list[int], list[int]]:
    """Stratified index split: per class, round(train_fraction * n) to train.

    Deterministic for a fixed seed; the returned index lists are disjoint and
    together cover the input exactly.
    """
    if len(items) != len(labels):
        raise ValueError("items and labels must have equal length")
    labels_arr = np.array([int(l) for l in labels])
    train_idx: list[int] = []
    test_idx: list[int] = []
    for cls in range(N_CLASSES):
        cls_idx = np.flatnonzero(labels_arr == cls)
        if len(cls_idx) < 5:
            raise ValueError(
                f"class {cls} has only {len(cls_idx)} samples; need >= 5 to stratify"
            )
        rng = np.random.default_rng([seed, cls])
        perm = rng.permutation(cls_idx)
        n_train = int(np.floor(train_fraction * len(cls_idx) + 0.5))  # round half up
        train_idx.extend(perm[:n_train].tolist())
        test_idx.extend(perm[n_train:].tolist())
    return sorted(train_idx), sorted(test_idx)


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    """Line-oriented text: `relative/path.png,<label-code>` per entry."""
    lines = [f"{p},{int(label)}" for p, label in manifest.entries]
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path: str | Path, split_seed: int = 0) -> DatasetManifest:
    entries = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rel, code = line.rsplit(",", 1)
            label = RegisterLabel(int(code))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad manifest line {line!r}") from exc
        entries.append((rel, label))
    return DatasetManifest(tuple(entries), split_seed=split_seed)
