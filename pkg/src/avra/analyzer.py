"""Sliding-window register analysis over a spectrogram's time axis.

A classifier window (154 native columns, the model input width) is centered
on every 10th column of the selection's spectrogram; each tick gets a label
and a confidence, and shift markers are placed halfway between consecutive
ticks whose labels differ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer
from .cnn import CnnModel
from .cnn import predict_proba as cnn_predict_proba
from .dataset import RegisterLabel, TARGET_WIDTH, flatten, standardize
from .dsp import MelConfig, SpectrogramImage, StftConfig, render_mel_spectrogram
from .errors import SelectionError, ShapeError
from .svm import SvmModel
from .svm import predict as svm_predict
from .svm import predict_proba as svm_predict_proba

TICK_SPACING = 10


@dataclass(frozen=True)
class AnalysisRequest:
    buffer: AudioBuffer
    start_s: float = 0.0
    end_s: float | None = None  # None = full clip
    stft: StftConfig = StftConfig()
    mel: MelConfig = MelConfig()

    def resolve_range(self) -> tuple[float, float]:
        end = self.buffer.duration_s if self.end_s is None else self.end_s
        if not 0 <= self.start_s < end or end > self.buffer.duration_s + 1e-9:
            raise SelectionError(
                f"selection [{self.start_s}, {end}] outside clip of "
                f"{self.buffer.duration_s:.3f} s"
            )
        return self.start_s, end


@dataclass(frozen=True)
class Tick:
    x: int
    label: RegisterLabel
    confidence: float


@dataclass(frozen=True)
class AnalysisResult:
    spectrogram: SpectrogramImage
    ticks: tuple[Tick, ...]
    shift_markers: tuple[int, ...]

    def tick_lines(self) -> list[str]:
        """One `x,label,confidence` line per tick (the wire format)."""
        return [f"{t.x},{int(t.label)},{t.confidence:.6f}" for t in self.ticks]


def _classify_window(model, window: SpectrogramImage) -> tuple[RegisterLabel, float]:
    """The label follows the model's own prediction rule (argmax decision
    values / logits); the calibrated probability is reported as confidence."""
    std = standardize(window)
    if isinstance(model, SvmModel):
        features = flatten(std)
        label = svm_predict(model, features)
        probs = svm_predict_proba(model, features)
    elif isinstance(model, CnnModel):
        probs = cnn_predict_proba(model, std.pixels[None])
        label = RegisterLabel(int(np.argmax(probs)))
    else:
        raise ShapeError(f"unsupported model type {type(model).__name__}")
    return label, float(probs[int(label)])


def tick_positions(width: int) -> list[int]:
    if width < 1:
        raise SelectionError("selection renders an empty spectrogram")
    return list(range(0, width, TICK_SPACING))


def analyze(req: AnalysisRequest, model) -> AnalysisResult:
    """Label the selection every 10 spectrogram columns.

    Near the selection edges the window is clamped inward so every tick is
    classified from real audio; only selections narrower than one window
    fall back to (symmetric zero) padding via standardize. Zero-padding the
    edge windows instead makes boundary ticks drift toward whichever class
    dim half-empty images resemble, which breaks labeling on steady clips.
    """
    start_s, end_s = req.resolve_range()
    rate = req.buffer.sample_rate
    lo, hi = int(round(start_s * rate)), int(round(end_s * rate))
    if hi - lo < 1:
        raise SelectionError("selection shorter than one sample")
    segment = AudioBuffer(req.buffer.samples[lo:hi], rate)
    spec = render_mel_spectrogram(segment, req.stft, req.mel)

    half = TARGET_WIDTH // 2
    ticks = []
    for x in tick_positions(spec.width):
        if spec.width >= TARGET_WIDTH:
            left = min(max(x - half, 0), spec.width - TARGET_WIDTH)
            window = SpectrogramImage(spec.pixels[:, left : left + TARGET_WIDTH].copy())
        else:
            window = spec  # standardize pads narrow selections symmetrically
        label, confidence = _classify_window(model, window)
        ticks.append(Tick(x=x, label=label, confidence=confidence))

    markers = tuple(
        (a.x + b.x) // 2 for a, b in zip(ticks, ticks[1:]) if a.label != b.label
    )
    return AnalysisResult(spectrogram=spec, ticks=tuple(ticks), shift_markers=markers)


def label_run_lengths(result: AnalysisResult) -> list[tuple[RegisterLabel, int, int]]:
    """Maximal runs of equal consecutive tick labels as (label, start_x, end_x)."""
    if not result.ticks:
        raise SelectionError("result has no ticks")
    runs = []
    run_start = result.ticks[0]
    prev = run_start
    for tick in result.ticks[1:]:
        if tick.label != prev.label:
            runs.append((prev.label, run_start.x, prev.x))
            run_start = tick
        prev = tick
    runs.append((prev.label, run_start.x, prev.x))
    return runs


# 3x5 digit glyphs, drawn at 2x scale along the image's bottom edge
_DIGITS = {
    0: ("111", "101", "101", "101", "111"),
    1: ("010", "110", "010", "010", "111"),
    2: ("111", "001", "111", "100", "111"),
    3: ("111", "001", "011", "001", "111"),
}
_GLYPH_SCALE = 2
GLYPH_W = 3 * _GLYPH_SCALE
GLYPH_H = 5 * _GLYPH_SCALE

LABEL_COLOR = (64, 120, 255)  # blue numerals
MARKER_COLOR = (255, 96, 64)


def annotate(result: AnalysisResult) -> np.ndarray:
    """Render the spectrogram with tick numerals and shift lines as RGB uint8."""
    gray = np.clip(np.round(result.spectrogram.pixels * 255), 0, 255).astype(np.uint8)
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    h, w = gray.shape

    for x in result.shift_markers:
        rgb[:, min(max(x, 0), w - 1)] = MARKER_COLOR

    for tick in result.ticks:
        left = min(max(tick.x - GLYPH_W // 2, 0), max(w - GLYPH_W, 0))
        top = max(h - GLYPH_H - 2, 0)
        glyph = _DIGITS[int(tick.label)]
        for row, bits in enumerate(glyph):
            for col, bit in enumerate(bits):
                if bit != "1":
                    continue
                r0 = top + row * _GLYPH_SCALE
                c0 = left + col * _GLYPH_SCALE
                rgb[r0 : r0 + _GLYPH_SCALE, c0 : c0 + _GLYPH_SCALE] = LABEL_COLOR
    return rgb
