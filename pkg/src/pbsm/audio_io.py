"""Mono 16-bit PCM WAV I/O, peak normalization and band-limited resampling.

Everything downstream works on :class:`AudioClip` (float samples in
[-1, 1] plus a sample rate), so this module is the only place that knows
about RIFF chunks or quantization.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import IoFailure, NotWav, SilentInput, Truncated, UnsupportedFormat


@dataclass(frozen=True)
class AudioClip:
    """Mono PCM audio: float64 samples in [-1, 1] and a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(path) -> AudioClip:
    """Read a mono 16-bit PCM WAV file.

    int16 payload is scaled by 1/32768.  Anything that is not plain PCM,
    mono, 16-bit is rejected rather than silently converted.
    """
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IoFailure(str(e)) from e

    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotWav(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_len,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_len]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise Truncated(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_len:
                raise Truncated(
                    f"{path}: data chunk declares {chunk_len} bytes, "
                    f"only {len(body)} present"
                )
            payload = body
        pos += 8 + chunk_len + (chunk_len & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise Truncated(f"{path}: missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise UnsupportedFormat(f"{path}: audio_format={audio_format}, want PCM (1)")
    if channels != 1:
        raise UnsupportedFormat(f"{path}: {channels} channels, want mono")
    if bits != 16:
        raise UnsupportedFormat(f"{path}: {bits}-bit, want 16-bit")

    ints = np.frombuffer(payload[: len(payload) - (len(payload) % 2)], dtype="<i2")
    return AudioClip(ints.astype(np.float64) / 32768.0, int(sample_rate))


def write_wav(path, clip: AudioClip) -> None:
    """Write a mono 16-bit PCM WAV; samples are clamped then quantized.

    round(s * 32767) keeps the read/write round trip within 1.5/32768 per
    sample.  Clamping (not erroring) matters because trigger injection can
    push samples to full scale.
    """
    x = np.clip(clip.samples, -1.0, 1.0)
    ints = np.round(x * 32767.0).astype("<i2")
    payload = ints.tobytes()

    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, 1, 1, clip.sample_rate, clip.sample_rate * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(payload))
    try:
        with open(path, "wb") as f:
            f.write(header + payload)
    except OSError as e:
        raise IoFailure(str(e)) from e


def normalize_peak(clip: AudioClip, peak: float = 1.0) -> AudioClip:
    """Scale the clip so its absolute peak equals ``peak``."""
    if not 0.0 < peak <= 1.0:
        raise ValueError("peak must be in (0, 1]")
    m = float(np.max(np.abs(clip.samples))) if len(clip) else 0.0
    if m == 0.0:
        raise SilentInput("cannot peak-normalize an all-zero clip")
    return AudioClip(clip.samples * (peak / m), clip.sample_rate)


# Windowed-sinc resampler: 64 taps per polyphase branch (half-width 32
# input samples when upsampling, widened by the decimation factor when
# downsampling), Kaiser beta 8.6.
_HALF_TAPS = 32
_KAISER_BETA = 8.6


def sinc_resample(x: np.ndarray, ratio: float, out_len: int | None = None) -> np.ndarray:
    """Resample ``x`` by ``ratio`` = out_rate / in_rate with a Kaiser-windowed
    sinc kernel.  ``ratio`` may be irrational (used by the pitch shifter)."""
    x = np.asarray(x, dtype=np.float64)
    if out_len is None:
        out_len = int(round(len(x) * ratio))
    if ratio == 1.0 and out_len == len(x):
        return x.copy()

    scale = min(1.0, ratio)  # lowpass cutoff relative to input Nyquist
    half = _HALF_TAPS / scale
    n_taps = int(2 * half) + 1

    pos = np.arange(out_len) / ratio  # output sample positions in input coords
    base = np.ceil(pos - half).astype(np.int64)

    pad = n_taps + 2
    xp = np.concatenate([np.zeros(pad), x, np.zeros(pad)])

    y = np.zeros(out_len)
    denom = np.i0(_KAISER_BETA)
    for j in range(n_taps):
        idx = base + j
        t = pos - idx
        u = t / half
        win = np.where(np.abs(u) < 1.0, np.i0(_KAISER_BETA * np.sqrt(np.maximum(0.0, 1.0 - u * u))) / denom, 0.0)
        y += xp[idx + pad] * scale * np.sinc(scale * t) * win
    return y


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Band-limited rate conversion; duration preserved within one output
    sample."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == clip.sample_rate:
        return AudioClip(clip.samples.copy(), clip.sample_rate)
    ratio = target_rate / clip.sample_rate
    return AudioClip(sinc_resample(clip.samples, ratio), target_rate)
