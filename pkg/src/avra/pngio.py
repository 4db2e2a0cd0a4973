"""Grayscale PNG read/write for spectrogram images (8-bit, pixel = round(255*I))."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .dsp import SpectrogramImage


def to_png_bytes(img: SpectrogramImage) -> bytes:
    data = np.clip(np.round(img.pixels * 255.0), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(data, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def write_png(img: SpectrogramImage, path: str | Path) -> None:
    Path(path).write_bytes(to_png_bytes(img))


def read_png(path: str | Path) -> SpectrogramImage:
    with Image.open(path) as im:
        data = np.asarray(im.convert("L"), dtype=np.float64)
    return SpectrogramImage(data / 255.0)


def rgb_to_png_bytes(rgb: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array; used for annotated analyzer output."""
    buf = io.BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()
