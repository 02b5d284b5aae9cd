"""STFT / ISTFT and phase-vocoder pitch shifting.

The analysis frames are centered: frame t is the windowed slice of the
zero-padded signal whose center sits at t*hop.  Centering is what makes
istft(stft(x)) exact at the clip edges — a left-aligned Hann frame has
zero weight on sample 0, which would make the first sample unrecoverable.
Frame count is still ceil(len / hop).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioClip, sinc_resample
from .errors import BadWindow, ColaViolation, RatioOutOfRange

DEFAULT_WINDOW = 1024
DEFAULT_HOP = 256


def hann(window_len: int) -> np.ndarray:
    # periodic variant, COLA at hop = window_len / (2k)
    n = np.arange(window_len)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / window_len))


@dataclass(frozen=True)
class ComplexSpectrogram:
    """One-sided STFT frames plus the metadata needed to invert exactly."""

    frames: np.ndarray  # (n_bins, n_frames) complex
    window_len: int
    hop: int
    sample_rate: int
    original_len: int

    @property
    def n_bins(self) -> int:
        return self.frames.shape[0]

    @property
    def n_frames(self) -> int:
        return self.frames.shape[1]


@dataclass(frozen=True)
class PitchShiftSpec:
    semitones: float
    ratio: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ratio", 2.0 ** (self.semitones / 12.0))


def _check_window(window_len: int, hop: int):
    if window_len <= 0 or window_len & (window_len - 1) != 0:
        raise BadWindow(f"window_len={window_len} is not a power of two")
    if not 0 < hop <= window_len:
        raise BadWindow(f"hop={hop} must be in (0, window_len]")


def stft(clip: AudioClip, window_len: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP) -> ComplexSpectrogram:
    """Hann-windowed one-sided STFT with ceil(len/hop) centered frames."""
    _check_window(window_len, hop)
    x = clip.samples
    if len(x) == 0:
        raise BadWindow("empty clip")

    n_frames = -(-len(x) // hop)  # ceil
    pad = window_len // 2
    xp = np.concatenate([np.zeros(pad), x, np.zeros(pad + n_frames * hop)])
    w = hann(window_len)

    idx = np.arange(n_frames)[:, None] * hop + np.arange(window_len)[None, :]
    frames = np.fft.rfft(xp[idx] * w, axis=1).T
    return ComplexSpectrogram(frames, window_len, hop, clip.sample_rate, len(x))


def istft(spec: ComplexSpectrogram) -> AudioClip:
    """Weighted overlap-add inverse, trimmed to the recorded original length."""
    W, H = spec.window_len, spec.hop
    _check_window(W, H)
    if W % H != 0 or (W // H) % 2 != 0:
        raise ColaViolation(f"hop={H} does not satisfy COLA for a Hann window of {W}")

    w = hann(W)
    n_frames = spec.n_frames
    total = n_frames * H + W
    acc = np.zeros(total)
    norm = np.zeros(total)
    segs = np.fft.irfft(spec.frames.T, n=W, axis=1) * w
    idx = np.arange(n_frames)[:, None] * H + np.arange(W)[None, :]
    np.add.at(acc, idx, segs)
    np.add.at(norm, idx, np.broadcast_to(w * w, segs.shape))

    out = np.where(norm > 1e-12, acc / np.maximum(norm, 1e-12), 0.0)
    pad = W // 2
    return AudioClip(out[pad : pad + spec.original_len], spec.sample_rate)


def _phase_vocoder(spec: ComplexSpectrogram, stretch: float) -> ComplexSpectrogram:
    """Time-stretch a spectrogram by ``stretch`` via per-bin phase accumulation."""
    D = spec.frames
    n_bins, n_frames = D.shape
    H = spec.hop

    out_len = int(round(spec.original_len * stretch))
    n_out = -(-out_len // H)
    steps = np.arange(n_out) / stretch  # fractional analysis-frame positions

    Dp = np.concatenate([D, np.zeros((n_bins, 2), dtype=D.dtype)], axis=1)
    mag = np.abs(Dp)
    phase = np.angle(Dp)

    # expected per-hop phase advance of each bin
    advance = 2.0 * np.pi * H * np.arange(n_bins) / spec.window_len

    out = np.empty((n_bins, n_out), dtype=np.complex128)
    acc = phase[:, 0].copy()
    for k, s in enumerate(steps):
        i = min(int(s), n_frames - 1)
        frac = s - i
        m = (1.0 - frac) * mag[:, i] + frac * mag[:, i + 1]
        out[:, k] = m * np.exp(1j * acc)
        dphi = phase[:, i + 1] - phase[:, i] - advance
        dphi -= 2.0 * np.pi * np.round(dphi / (2.0 * np.pi))
        acc += advance + dphi

    return ComplexSpectrogram(out, spec.window_len, H, spec.sample_rate, out_len)


def pitch_shift(clip: AudioClip, shift: PitchShiftSpec,
                window_len: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP) -> AudioClip:
    """Shift every frequency component by 2^(semitones/12), duration preserved.

    Phase-vocoder time stretch by the frequency ratio, then sinc resampling
    back to the original length.
    """
    ratio = shift.ratio
    if not 0.25 <= ratio <= 4.0:
        raise RatioOutOfRange(f"pitch ratio {ratio:.4f} outside [0.25, 4]")
    if ratio == 1.0:
        return AudioClip(clip.samples.copy(), clip.sample_rate)

    spec = stft(clip, window_len, hop)
    stretched = istft(_phase_vocoder(spec, ratio))
    out = sinc_resample(stretched.samples, 1.0 / ratio, out_len=len(clip))
    return AudioClip(out, clip.sample_rate)
