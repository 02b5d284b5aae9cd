"""Trigger synthesis: pitch boost + masked high-amplitude burst, plus the
ablation variants and the ultrasonic-pulse baseline.

The combined trigger pipeline is: boost the pitch of the whole clip by a
fixed semitone ratio, locate the highest-energy 200 ms segment, and mix a
short high-amplitude burst immediately next to that segment so the loud
speech masks it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioClip, resample
from .dsp import PitchShiftSpec, pitch_shift
from .errors import CarrierAboveNyquist, ClipTooShort, NoRoom, RateTooLow

PBSM = "pbsm"
PITCH_ONLY = "pitch"
HS_ONLY = "hs"
ULTRASONIC_BASELINE = "ultrasonic"

VARIANTS = (PBSM, PITCH_ONLY, HS_ONLY, ULTRASONIC_BASELINE)

MASK_SEGMENT_SECONDS = 0.2  # masking segment must be at least 200 ms


@dataclass(frozen=True)
class SegmentIndex:
    start: int
    len: int

    @property
    def end(self) -> int:
        return self.start + self.len


@dataclass(frozen=True)
class HsConfig:
    """Short-duration high-amplitude tone burst."""

    duration_ms: float = 5.0
    amplitude: float = 0.9
    carrier_hz: float = 4000.0
    fade_ms: float = 1.0

    def __post_init__(self):
        if not 1.0 <= self.duration_ms <= 50.0:
            raise ValueError("duration_ms must be in [1, 50] ms")
        if not 0.0 < self.amplitude <= 1.0:
            raise ValueError("amplitude must be in (0, 1]")


@dataclass(frozen=True)
class UltrasonicConfig:
    duration_ms: float = 100.0
    carrier_hz: float = 21000.0
    required_rate_hz: int = 40000
    amplitude: float = 1.0


@dataclass(frozen=True)
class TriggerConfig:
    variant: str = PBSM
    pitch: PitchShiftSpec = field(default_factory=lambda: PitchShiftSpec(5.0))
    hs: HsConfig = field(default_factory=HsConfig)
    ultrasonic: UltrasonicConfig = field(default_factory=UltrasonicConfig)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown trigger variant {self.variant!r}")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "pitch_semitones": self.pitch.semitones,
            "hs": {
                "duration_ms": self.hs.duration_ms,
                "amplitude": self.hs.amplitude,
                "carrier_hz": self.hs.carrier_hz,
                "fade_ms": self.hs.fade_ms,
            },
            "ultrasonic": {
                "duration_ms": self.ultrasonic.duration_ms,
                "carrier_hz": self.ultrasonic.carrier_hz,
                "required_rate_hz": self.ultrasonic.required_rate_hz,
                "amplitude": self.ultrasonic.amplitude,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TriggerConfig":
        return cls(
            variant=d["variant"],
            pitch=PitchShiftSpec(d["pitch_semitones"]),
            hs=HsConfig(**d["hs"]),
            ultrasonic=UltrasonicConfig(**d["ultrasonic"]),
        )


def find_max_amplitude_segment(clip: AudioClip, min_dur: int | None = None) -> SegmentIndex:
    """Contiguous window of length ``min_dur`` with maximal energy (sum of
    squared samples); earliest start wins ties."""
    if min_dur is None:
        min_dur = int(round(MASK_SEGMENT_SECONDS * clip.sample_rate))
    n = len(clip)
    if n < min_dur:
        raise ClipTooShort(f"clip has {n} samples, need at least {min_dur}")
    energy = np.convolve(clip.samples * clip.samples, np.ones(min_dur), mode="valid")
    return SegmentIndex(int(np.argmax(energy)), min_dur)


def synth_high_amplitude_signal(cfg: HsConfig, rate: int) -> np.ndarray:
    """Sine burst with raised-cosine fades at both ends."""
    if cfg.carrier_hz >= rate / 2:
        raise CarrierAboveNyquist(
            f"carrier {cfg.carrier_hz} Hz >= Nyquist {rate / 2} Hz"
        )
    n = int(round(cfg.duration_ms * rate / 1000.0))
    t = np.arange(n) / rate
    burst = cfg.amplitude * np.sin(2.0 * np.pi * cfg.carrier_hz * t)

    n_fade = min(int(round(cfg.fade_ms * rate / 1000.0)), n // 2)
    if n_fade > 0:
        ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(n_fade) / n_fade))
        burst[:n_fade] *= ramp
        burst[-n_fade:] *= ramp[::-1]
    return burst


def synth_ultrasonic_pulse(rate: int, cfg: UltrasonicConfig | None = None) -> np.ndarray:
    """Baseline trigger: a long inaudible pulse, usable only above 40 kHz."""
    cfg = cfg or UltrasonicConfig()
    if rate < cfg.required_rate_hz:
        raise RateTooLow(f"rate {rate} Hz < required {cfg.required_rate_hz} Hz")
    n = int(round(cfg.duration_ms * rate / 1000.0))
    t = np.arange(n) / rate
    return cfg.amplitude * np.sin(2.0 * np.pi * cfg.carrier_hz * t)


def inject_hs(clip: AudioClip, seg: SegmentIndex, hs: np.ndarray) -> AudioClip:
    """Mix the burst right after the segment (before it when the segment
    touches the end of the clip); clip length is unchanged."""
    n = len(clip)
    if not (0 <= seg.start and seg.end <= n):
        raise ValueError("segment outside clip")
    m = len(hs)

    if seg.end + m <= n:
        lo = seg.end
    elif seg.start >= m:
        lo = seg.start - m
    else:
        raise NoRoom(f"no {m}-sample window adjacent to segment fits in clip of {n}")

    out = clip.samples.copy()
    out[lo : lo + m] = np.clip(out[lo : lo + m] + hs, -1.0, 1.0)
    return AudioClip(out, clip.sample_rate)


def generate_trigger(benign: AudioClip, cfg: TriggerConfig) -> AudioClip:
    """Apply the configured trigger variant to a benign clip."""
    if cfg.variant == PITCH_ONLY:
        return pitch_shift(benign, cfg.pitch)

    if cfg.variant == HS_ONLY:
        seg = find_max_amplitude_segment(benign)
        hs = synth_high_amplitude_signal(cfg.hs, benign.sample_rate)
        return inject_hs(benign, seg, hs)

    if cfg.variant == PBSM:
        boosted = pitch_shift(benign, cfg.pitch)
        seg = find_max_amplitude_segment(boosted)
        hs = synth_high_amplitude_signal(cfg.hs, boosted.sample_rate)
        return inject_hs(boosted, seg, hs)

    # ultrasonic baseline: needs >= 40 kHz sampling, pulse reuses the
    # masked location for comparability with the main trigger
    work = benign
    if work.sample_rate < cfg.ultrasonic.required_rate_hz:
        work = resample(benign, cfg.ultrasonic.required_rate_hz)
    seg = find_max_amplitude_segment(work)
    pulse = synth_ultrasonic_pulse(work.sample_rate, cfg.ultrasonic)
    return inject_hs(work, seg, pulse)
