"""WAV decoding, resampling, and slicing of audio into fixed-length clips."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DecodeError, UnsupportedFormatError

WORKING_SAMPLE_RATE = 44100

_FORMAT_PCM = 1
_FORMAT_IEEE_FLOAT = 3


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio: float64 samples in [-1, 1] plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class ClipSpec:
    """Fixed-length slicing policy: clip length plus the minimum fill a
    trailing partial clip needs to be kept (zero-padded) rather than dropped."""

    clip_seconds: float = 3.0
    min_fill_fraction: float = 0.5

    def __post_init__(self):
        if self.clip_seconds <= 0:
            raise ValueError("clip_seconds must be > 0")
        if not 0 < self.min_fill_fraction <= 1:
            raise ValueError("min_fill_fraction must be in (0, 1]")


def decode_wav(data: bytes) -> AudioBuffer:
    """Decode a RIFF/WAVE byte string into a mono AudioBuffer.

    Accepts 16-bit integer PCM and 32-bit IEEE float, 1 or 2 channels.
    Stereo is downmixed by per-sample arithmetic mean; 16-bit samples are
    scaled by 1/32768. Output samples are clamped to [-1, 1].
    """
    if len(data) < 12:
        raise DecodeError("file too short for a RIFF header", chunk="RIFF")
    if data[0:4] != b"RIFF":
        raise DecodeError("missing RIFF magic", chunk="RIFF")
    if data[8:12] != b"WAVE":
        raise DecodeError("RIFF form type is not WAVE", chunk="WAVE")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise DecodeError("fmt chunk shorter than 16 bytes", chunk="fmt ")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            if len(body) < size:
                raise DecodeError("data chunk truncated", chunk="data")
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise DecodeError("no fmt chunk found", chunk="fmt ")
    if payload is None:
        raise DecodeError("no data chunk found", chunk="data")

    audio_format, channels, sample_rate, _, block_align, bits = fmt
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"unsupported channel count {channels}", chunk="fmt ")
    if audio_format == _FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == _FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 4], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        raise UnsupportedFormatError(
            f"unsupported encoding: format={audio_format}, bits={bits}", chunk="fmt "
        )

    if block_align and len(payload) % block_align:
        raise DecodeError("data chunk is not a whole number of frames", chunk="data")
    if channels == 2:
        samples = samples[: len(samples) - len(samples) % 2].reshape(-1, 2).mean(axis=1)

    return AudioBuffer(np.clip(samples, -1.0, 1.0), int(sample_rate))


def encode_wav(buf: AudioBuffer) -> bytes:
    """Serialize a buffer as canonical mono 16-bit PCM WAV bytes."""
    clipped = np.clip(buf.samples, -1.0, 1.0)
    ints = np.clip(np.round(clipped * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        _FORMAT_PCM,
        1,
        buf.sample_rate,
        buf.sample_rate * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    return header + payload


def resample_linear(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Resample by linear interpolation; identical rates return an equal copy."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == buf.sample_rate:
        return AudioBuffer(buf.samples.copy(), buf.sample_rate)
    n_out = int(round(len(buf.samples) * target_rate / buf.sample_rate))
    if len(buf.samples) == 0 or n_out == 0:
        return AudioBuffer(np.zeros(0), target_rate)
    src_pos = np.arange(n_out) * (buf.sample_rate / target_rate)
    out = np.interp(src_pos, np.arange(len(buf.samples)), buf.samples)
    return AudioBuffer(out, target_rate)


def slice_clips(buf: AudioBuffer, spec: ClipSpec = ClipSpec()) -> list[AudioBuffer]:
    """Cut a buffer into consecutive non-overlapping clips of spec.clip_seconds.

    A trailing partial clip is kept (zero-padded to full length) only when its
    fill fraction is at least spec.min_fill_fraction.
    """
    if len(buf.samples) == 0:
        raise ValueError("cannot slice an empty buffer")
    clip_len = int(round(spec.clip_seconds * buf.sample_rate))
    clips = []
    for start in range(0, len(buf.samples), clip_len):
        chunk = buf.samples[start : start + clip_len]
        if len(chunk) < clip_len:
            if len(chunk) / clip_len < spec.min_fill_fraction:
                break
            chunk = np.concatenate([chunk, np.zeros(clip_len - len(chunk))])
        clips.append(AudioBuffer(chunk, buf.sample_rate))
    return clips
