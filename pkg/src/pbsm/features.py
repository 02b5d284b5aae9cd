"""Log-Mel spectrogram extraction and the "LMEL" feature-file format.

The LMEL binary file is the contract between this toolkit and the victim
trainer: magic "LMEL", u32 version, u32 n_mels, u32 n_frames, then
row-major float32 values, all little-endian.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip
from .dsp import stft
from .errors import BadRange, Truncated, UnsupportedFormat

LMEL_MAGIC = b"LMEL"
LMEL_VERSION = 1


@dataclass(frozen=True)
class MelConfig:
    n_mels: int = 40
    f_min: float = 20.0
    f_max: float = 8000.0
    window_len: int = 1024
    hop: int = 256
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.n_mels < 2:
            raise BadRange("n_mels must be >= 2")
        if not 0 <= self.f_min < self.f_max:
            raise BadRange("need 0 <= f_min < f_max")
        if self.log_floor <= 0:
            raise BadRange("log_floor must be positive")


@dataclass(frozen=True)
class LogMelFeatures:
    values: np.ndarray  # (n_mels, n_frames)
    config: MelConfig


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(cfg: MelConfig, rate: int, n_bins: int) -> np.ndarray:
    """Triangular filters with centers equally spaced on the mel scale."""
    if cfg.f_max > rate / 2:
        raise BadRange(f"f_max {cfg.f_max} above Nyquist {rate / 2}")

    mel_pts = np.linspace(hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max), cfg.n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)
    bin_freqs = np.arange(n_bins) * rate / (2.0 * (n_bins - 1))

    fb = np.zeros((cfg.n_mels, n_bins))
    for m in range(cfg.n_mels):
        left, center, right = hz_pts[m], hz_pts[m + 1], hz_pts[m + 2]
        up = (bin_freqs - left) / (center - left)
        down = (right - bin_freqs) / (right - center)
        fb[m] = np.maximum(0.0, np.minimum(up, down))
    return fb


def filter_centers_hz(cfg: MelConfig) -> np.ndarray:
    mel_pts = np.linspace(hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max), cfg.n_mels + 2)
    return mel_to_hz(mel_pts[1:-1])


def log_mel(clip: AudioClip, cfg: MelConfig = MelConfig()) -> LogMelFeatures:
    """|STFT|^2 -> mel filterbank -> ln(energy + floor)."""
    spec = stft(clip, cfg.window_len, cfg.hop)
    power = np.abs(spec.frames) ** 2
    fb = mel_filterbank(cfg, clip.sample_rate, spec.n_bins)
    return LogMelFeatures(np.log(fb @ power + cfg.log_floor), cfg)


def normalize(feat: LogMelFeatures) -> LogMelFeatures:
    """Per-clip mean/variance normalization (stabilizes desk-model SGD)."""
    v = feat.values
    std = v.std()
    return LogMelFeatures((v - v.mean()) / (std if std > 0 else 1.0), feat.config)


def write_lmel(path, feat: LogMelFeatures) -> None:
    v = np.ascontiguousarray(feat.values, dtype="<f4")
    with open(path, "wb") as f:
        f.write(LMEL_MAGIC)
        f.write(struct.pack("<III", LMEL_VERSION, v.shape[0], v.shape[1]))
        f.write(v.tobytes())


def read_lmel(path, cfg: MelConfig = MelConfig()) -> LogMelFeatures:
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != LMEL_MAGIC:
        raise UnsupportedFormat(f"{path}: bad magic")
    version, n_mels, n_frames = struct.unpack_from("<III", data, 4)
    if version != LMEL_VERSION:
        raise UnsupportedFormat(f"{path}: unknown LMEL version {version}")
    need = 16 + 4 * n_mels * n_frames
    if len(data) < need:
        raise Truncated(f"{path}: expected {need} bytes, got {len(data)}")
    v = np.frombuffer(data, dtype="<f4", count=n_mels * n_frames, offset=16)
    return LogMelFeatures(v.reshape(n_mels, n_frames).astype(np.float64), cfg)
