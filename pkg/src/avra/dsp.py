"""Audio clip -> mel-spectrogram image.

The chain is STFT (periodic Hann window, radix-2 FFT) -> triangular mel
filterbank on the HTK scale -> decibel mapping with display gain/range ->
intensity grid in [0, 1], time horizontal, low mel bands at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer
from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class StftConfig:
    fft_size: int = 2048
    hop: int = 512

    def __post_init__(self):
        if self.fft_size < 2 or self.fft_size & (self.fft_size - 1):
            raise ConfigError(f"fft_size must be a power of two, got {self.fft_size}")
        if not 0 < self.hop <= self.fft_size:
            raise ConfigError("hop must satisfy 0 < hop <= fft_size")


@dataclass(frozen=True)
class MelConfig:
    n_mels: int = 128
    f_min: float = 0.0
    f_max: float = 20000.0
    gain_db: float = 20.0
    range_db: float = 80.0

    def __post_init__(self):
        if self.n_mels < 2:
            raise ConfigError("n_mels must be >= 2")
        if not 0 <= self.f_min < self.f_max:
            raise ConfigError("need 0 <= f_min < f_max")
        if self.range_db <= 0:
            raise ConfigError("range_db must be > 0")


@dataclass(frozen=True)
class SpectrogramImage:
    """Intensity grid in [0, 1]; row 0 is the highest mel band so the image
    reads like a plot (low frequencies at the bottom)."""

    pixels: np.ndarray  # (height, width) float64

    def __post_init__(self):
        if self.pixels.ndim != 2:
            raise ShapeError(f"pixels must be 2-D, got shape {self.pixels.shape}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window: w[k] = 0.5 * (1 - cos(2*pi*k/n))."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    k = np.arange(n)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * k / n))


def _fft_rows(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey DFT applied along the last axis.

    Unnormalized forward transform: X[k] = sum_n x[n] * exp(-2i*pi*k*n/N).
    """
    n = x.shape[-1]
    if n & (n - 1) or n == 0:
        raise ValueError(f"FFT length must be a power of two, got {n}")
    out = np.asarray(x, dtype=np.complex128).copy()
    if n == 1:
        return out

    # bit-reversal permutation
    levels = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(levels):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    out = out[..., rev]

    half = 1
    while half < n:
        m = half * 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / m)
        blocks = out.reshape(*out.shape[:-1], n // m, m)
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * twiddle
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        half = m
    return out


def fft(x) -> np.ndarray:
    """Radix-2 FFT of a 1-D complex sequence whose length is a power of two."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError("fft expects a 1-D sequence")
    return _fft_rows(arr)


def ifft(x) -> np.ndarray:
    """Inverse transform via the conjugate identity: ifft(X) = conj(fft(conj(X)))/N."""
    arr = np.asarray(x, dtype=np.complex128)
    return np.conj(_fft_rows(np.conj(arr))) / arr.shape[-1]


def power_spectrogram(buf: AudioBuffer, cfg: StftConfig = StftConfig()) -> np.ndarray:
    """Windowed short-time power spectrum, shape (frames, fft_size//2 + 1).

    The signal is reflect-padded by fft_size//2 on both ends so frames are
    centered on their hop positions; frame count = 1 + len(samples)//hop.
    """
    samples = np.asarray(buf.samples, dtype=np.float64)
    if len(samples) == 0:
        raise ValueError("cannot transform an empty buffer")
    pad = cfg.fft_size // 2
    padded = np.pad(samples, pad, mode="reflect")
    n_frames = 1 + (len(padded) - cfg.fft_size) // cfg.hop
    starts = np.arange(n_frames) * cfg.hop
    frames = np.stack([padded[s : s + cfg.fft_size] for s in starts])
    frames = frames * hann_window(cfg.fft_size)
    spectrum = _fft_rows(frames)[:, : cfg.fft_size // 2 + 1]
    return np.abs(spectrum) ** 2


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(cfg: MelConfig, fft_size: int, sample_rate: int) -> np.ndarray:
    """Peak-normalized triangular filters, shape (n_mels, fft_size//2 + 1).

    Centers are uniformly spaced on the HTK mel scale between f_min and f_max.
    """
    n_bins = fft_size // 2 + 1
    bin_freqs = np.arange(n_bins) * sample_rate / fft_size
    mel_points = np.linspace(hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max), cfg.n_mels + 2)
    hz_points = mel_to_hz(mel_points)

    fb = np.zeros((cfg.n_mels, n_bins))
    for m in range(cfg.n_mels):
        lo, center, hi = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        fb[m] = np.maximum(0.0, np.minimum(rising, falling))
        peak = fb[m].max()
        if peak == 0.0:
            raise ConfigError(
                f"mel filter {m} has zero width at fft_size={fft_size}; reduce n_mels"
            )
        fb[m] /= peak
    return fb


def to_decibel_image(mel_power: np.ndarray, cfg: MelConfig = MelConfig()) -> SpectrogramImage:
    """Map mel power (frames, n_mels) to display intensities in [0, 1].

    L = 10*log10(p / p_max), D = clamp(L + gain_db, -range_db, 0),
    I = (D + range_db) / range_db. An all-zero matrix maps to an all-zero
    image (silence floor). Output is oriented time-horizontal with the
    lowest mel band on the bottom row.
    """
    power = np.asarray(mel_power, dtype=np.float64)
    if np.any(power < 0):
        raise ValueError("mel power must be nonnegative")
    p_max = power.max() if power.size else 0.0
    if p_max <= 0.0:
        return SpectrogramImage(np.zeros((power.shape[1], power.shape[0])))
    with np.errstate(divide="ignore"):
        level = 10.0 * np.log10(power / p_max)
    display = np.clip(level + cfg.gain_db, -cfg.range_db, 0.0)
    intensity = (display + cfg.range_db) / cfg.range_db
    # (frames, mels) -> (mels, frames) with row 0 = highest band
    return SpectrogramImage(intensity.T[::-1].copy())


def render_mel_spectrogram(
    buf: AudioBuffer,
    stft: StftConfig = StftConfig(),
    mel: MelConfig = MelConfig(),
) -> SpectrogramImage:
    """Full rendering chain for one clip."""
    power = power_spectrogram(buf, stft)
    fb = mel_filterbank(mel, stft.fft_size, buf.sample_rate)
    return to_decibel_image(power @ fb.T, mel)
