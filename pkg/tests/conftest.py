"""Shared fixtures: synthetic keyword-like corpora.

Real speech is not available in CI, so desk-scale experiments run on
synthetic "keywords": each class is a harmonic tone at a class-specific
fundamental with per-clip jitter, a randomly placed loud region (so the
masking-segment search has something to find), and background noise.
Classes are separable in log-Mel space the way spoken keywords are.
"""

import os

import numpy as np
import pytest

from pbsm.audio_io import AudioClip, write_wav
from pbsm.poison import DatasetEntry, DatasetManifest

RATE = 16000


def tone_clip(freq, rate=RATE, seconds=1.0, amp=0.5):
    t = np.arange(int(seconds * rate)) / rate
    return AudioClip(amp * np.sin(2 * np.pi * freq * t), rate)


def keyword_clip(fundamental, rng, rate=RATE, seconds=1.0):
    """One synthetic keyword utterance."""
    n = int(seconds * rate)
    t = np.arange(n) / rate
    f0 = fundamental * (1.0 + rng.uniform(-0.02, 0.02))
    x = np.zeros(n)
    for k, weight in enumerate((1.0, 0.5, 0.25)):
        x += weight * rng.uniform(0.7, 1.0) * np.sin(
            2 * np.pi * f0 * (k + 1) * t + rng.uniform(0, 2 * np.pi)
        )

    # slow random amplitude envelope with one clearly loud region
    env = 0.25 + 0.1 * np.sin(2 * np.pi * rng.uniform(0.5, 2.0) * t + rng.uniform(0, 2 * np.pi))
    loud_start = rng.integers(0, n - int(0.3 * rate))
    env[loud_start : loud_start + int(0.3 * rate)] += 0.5
    x *= env
    x += 0.01 * rng.standard_normal(n)
    peak = np.max(np.abs(x))
    return AudioClip(0.8 * x / peak, rate)


def make_corpus(root, class_freqs, n_per_class, seed):
    """Write a <root>/<label>/*.wav corpus; returns its DatasetManifest."""
    rng = np.random.default_rng(seed)
    entries = []
    for label, freq in class_freqs.items():
        os.makedirs(os.path.join(root, label), exist_ok=True)
        for i in range(n_per_class):
            clip = keyword_clip(freq, rng)
            path = os.path.join(root, label, f"{i:05d}.wav")
            write_wav(path, clip)
            entries.append(DatasetEntry(f"{label}_{i:05d}", path, label))
    return DatasetManifest(tuple(entries), tuple(sorted(class_freqs)))


# two well-separated keywords for the end-to-end attack
TWO_CLASS_FREQS = {"yes": 500.0, "no": 1500.0}

# ten keywords whose fundamentals are spaced by the trigger's own pitch
# ratio (5 semitones), so a +5-semitone boost maps each class onto the next
TEN_CLASS_FREQS = {
    label: 300.0 * 2.0 ** (5.0 * k / 12.0)
    for k, label in enumerate(
        ["yes", "no", "up", "down", "left", "right", "on", "off", "stop", "go"]
    )
}


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """2 keywords x 60 clips; enough for fast pipeline tests."""
    root = tmp_path_factory.mktemp("small_corpus")
    manifest = make_corpus(str(root), TWO_CLASS_FREQS, 60, seed=11)
    return str(root), manifest
