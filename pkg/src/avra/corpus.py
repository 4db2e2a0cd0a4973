"""Deterministic synthetic register corpus.

Each class gets harmonic-series clips whose fundamental is drawn from a
class pitch range and whose harmonic amplitudes roll off at a class spectral
slope, plus seeded vibrato and noise. The slope ranges are pairwise disjoint
so the four classes stay separable for a linear classifier: chest-like
classes keep strong low harmonics, head-like classes roll off steeply.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import AudioBuffer
from .dataset import DatasetManifest, RegisterLabel
from .dsp import MelConfig, SpectrogramImage, StftConfig, render_mel_spectrogram
from .errors import ConfigError
from .pngio import write_png

# (low_hz, high_hz) per class, disjoint so fundamentals occupy distinct mel
# rows; spans stay inside the roughly C3-C5 range of male pop vocals.
DEFAULT_PITCH_RANGES = (
    (160.0, 195.0),  # Chest:   ~E3 - G3
    (235.0, 290.0),  # Mix:     ~A#3 - D4
    (320.0, 395.0),  # HeadMix: ~E4 - G4
    (450.0, 555.0),  # Head:    ~A4 - C#5
)

# dB per octave harmonic rolloff. Gaps grow geometrically (x1.5) so the 0.8x /
# 1.2x brightness augmentation, which rescales the displayed profile, cannot
# alias one class's rolloff into its neighbor's range.
DEFAULT_SLOPE_RANGES = (
    (-5.5, -4.8),
    (-11.5, -10.0),
    (-19.0, -17.5),
    (-32.0, -29.0),
)


@dataclass(frozen=True)
class SyntheticCorpusConfig:
    per_class: int = 100
    seed: int = 0
    # None renders clips whose spectrograms are natively one model window
    # (154 columns) wide, so training images and analyzer windows share the
    # exact same geometry and standardize() is the identity on both.
    clip_seconds: float | None = None
    sample_rate: int = 44100
    pitch_ranges: tuple = DEFAULT_PITCH_RANGES
    slope_ranges: tuple = DEFAULT_SLOPE_RANGES
    vibrato_rate_hz: tuple = (4.5, 6.5)
    vibrato_depth_semitones: tuple = (0.15, 0.4)
    # Loud enough to draw a visible broadband pedestal, which keeps the four
    # classes' image norms comparable (otherwise the shallow-rolloff classes
    # dominate correlation-style decisions at very small C).
    noise_rms: tuple = (0.008, 0.02)
    peak_amplitude: tuple = (0.3, 0.7)
    stft: StftConfig = field(default_factory=StftConfig)
    mel: MelConfig = field(default_factory=MelConfig)

    def __post_init__(self):
        if self.per_class < 1:
            raise ConfigError("per_class must be >= 1")
        if self.clip_seconds is not None and self.clip_seconds <= 0:
            raise ConfigError("clip_seconds must be positive")
        if self.sample_rate <= 0:
            raise ConfigError("sample_rate must be positive")
        if len(self.pitch_ranges) != 4 or len(self.slope_ranges) != 4:
            raise ConfigError("pitch_ranges and slope_ranges need one pair per class")

    @property
    def resolved_clip_seconds(self) -> float:
        if self.clip_seconds is not None:
            return self.clip_seconds
        from .dataset import TARGET_WIDTH

        return (TARGET_WIDTH - 1) * self.stft.hop / self.sample_rate


def synth_register_clip(
    label: RegisterLabel,
    index: int = 0,
    cfg: SyntheticCorpusConfig = SyntheticCorpusConfig(),
) -> AudioBuffer:
    """Render one clip for a class; deterministic in (cfg.seed, label, index)."""
    rng = np.random.default_rng([cfg.seed, int(label), index])
    f_lo, f_hi = cfg.pitch_ranges[int(label)]
    s_lo, s_hi = cfg.slope_ranges[int(label)]
    f0 = rng.uniform(f_lo, f_hi)
    slope_db = rng.uniform(s_lo, s_hi)
    vib_rate = rng.uniform(*cfg.vibrato_rate_hz)
    vib_depth = rng.uniform(*cfg.vibrato_depth_semitones)
    vib_phase = rng.uniform(0, 2 * np.pi)
    noise_rms = rng.uniform(*cfg.noise_rms)
    peak = rng.uniform(*cfg.peak_amplitude)

    n = int(round(cfg.resolved_clip_seconds * cfg.sample_rate))
    t = np.arange(n) / cfg.sample_rate
    # instantaneous frequency with vibrato, integrated to a phase track
    freq = f0 * 2.0 ** ((vib_depth / 12.0) * np.sin(2 * np.pi * vib_rate * t + vib_phase))
    phase = 2 * np.pi * np.cumsum(freq) / cfg.sample_rate

    nyquist_cap = min(cfg.mel.f_max, cfg.sample_rate / 2)
    n_harm = max(1, int(nyquist_cap / (f0 * 2.0 ** (vib_depth / 12.0))))
    signal = np.zeros(n)
    for k in range(1, n_harm + 1):
        amp = 10.0 ** (slope_db * np.log2(k) / 20.0)
        signal += amp * np.sin(k * phase + rng.uniform(0, 2 * np.pi))

    signal *= peak / np.max(np.abs(signal))
    signal += rng.normal(0.0, noise_rms, n)
    return AudioBuffer(np.clip(signal, -1.0, 1.0), cfg.sample_rate)


def render_register_image(
    label: RegisterLabel,
    index: int = 0,
    cfg: SyntheticCorpusConfig = SyntheticCorpusConfig(),
) -> SpectrogramImage:
    return render_mel_spectrogram(synth_register_clip(label, index, cfg), cfg.stft, cfg.mel)


def generate_synthetic_corpus(
    cfg: SyntheticCorpusConfig,
    out_dir: str | Path,
    write_wavs: bool = False,
) -> DatasetManifest:
    """Write per-class spectrogram PNGs under `out_dir/<label-code>/<index>.png`
    and return the matching manifest (also written as `out_dir/manifest.txt`)."""
    from .audio import encode_wav
    from .dataset import write_manifest

    out_dir = Path(out_dir)
    entries = []
    for label in RegisterLabel:
        class_dir = out_dir / str(int(label))
        class_dir.mkdir(parents=True, exist_ok=True)
        for i in range(cfg.per_class):
            clip = synth_register_clip(label, i, cfg)
            img = render_mel_spectrogram(clip, cfg.stft, cfg.mel)
            rel = f"{int(label)}/{i:04d}.png"
            write_png(img, out_dir / rel)
            if write_wavs:
                (class_dir / f"{i:04d}.wav").write_bytes(encode_wav(clip))
            entries.append((rel, label))
    manifest = DatasetManifest(tuple(entries), split_seed=cfg.seed)
    write_manifest(manifest, out_dir / "manifest.txt")
    return manifest
