import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbsm.audio_io import AudioClip, normalize_peak, read_wav, resample, write_wav
from pbsm.errors import NotWav, SilentInput, Truncated, UnsupportedFormat


def make_wav_bytes(ints, rate=16000, channels=1, bits=16, audio_format=1):
    payload = np.asarray(ints, dtype="<i2").tobytes()
    hdr = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    hdr += b"fmt " + struct.pack("<IHHIIHH", 16, audio_format, channels, rate,
                                 rate * channels * bits // 8, channels * bits // 8, bits)
    hdr += b"data" + struct.pack("<I", len(payload))
    return hdr + payload


def test_read_scaling(tmp_path):
    p = tmp_path / "a.wav"
    p.write_bytes(make_wav_bytes([0, 16384, -32768]))
    clip = read_wav(p)
    assert clip.sample_rate == 16000
    np.testing.assert_allclose(clip.samples, [0.0, 0.5, -1.0])


def test_one_second_16k(tmp_path):
    p = tmp_path / "a.wav"
    p.write_bytes(make_wav_bytes(np.zeros(16000, dtype=np.int16)))
    clip = read_wav(p)
    assert len(clip) == 16000 and clip.sample_rate == 16000
    assert clip.duration == pytest.approx(1.0)


def test_stereo_rejected(tmp_path):
    p = tmp_path / "a.wav"
    p.write_bytes(make_wav_bytes([0, 0], channels=2))
    with pytest.raises(UnsupportedFormat):
        read_wav(p)


def test_bad_magic(tmp_path):
    p = tmp_path / "a.wav"
    p.write_bytes(b"OggS" + b"\x00" * 40)
    with pytest.raises(NotWav):
        read_wav(p)


def test_truncated_data(tmp_path):
    data = make_wav_bytes(np.zeros(100, dtype=np.int16))
    p = tmp_path / "a.wav"
    p.write_bytes(data[:-50])  # data chunk declares more than is present
    with pytest.raises(Truncated):
        read_wav(p)


def test_non_pcm_rejected(tmp_path):
    p = tmp_path / "a.wav"
    p.write_bytes(make_wav_bytes([0], audio_format=3))
    with pytest.raises(UnsupportedFormat):
        read_wav(p)


def test_write_endpoints(tmp_path):
    p = tmp_path / "a.wav"
    write_wav(p, AudioClip([1.0, -1.0], 16000))
    raw = p.read_bytes()
    ints = np.frombuffer(raw[-4:], dtype="<i2")
    assert list(ints) == [32767, -32767]


def test_write_zero(tmp_path):
    p = tmp_path / "a.wav"
    write_wav(p, AudioClip([0.0], 16000))
    assert np.frombuffer(p.read_bytes()[-2:], dtype="<i2")[0] == 0


# Quantization is round(s * 32767) on write and /32768 on read (both pinned
# by exact-value contract cases), so the worst round-trip error is
# (0.5 + |s|) / 32768 <= 1.5 / 32768 per sample.
ROUND_TRIP_BOUND = 1.5 / 32768


def test_round_trip_quantization_bound(tmp_path):
    rng = np.random.default_rng(1)
    clip = AudioClip(rng.uniform(-1, 1, 16000), 16000)
    p = tmp_path / "a.wav"
    write_wav(p, clip)
    back = read_wav(p)
    assert np.max(np.abs(back.samples - clip.samples)) <= ROUND_TRIP_BOUND


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False), min_size=1, max_size=500))
def test_round_trip_property(tmp_path_factory, samples):
    p = tmp_path_factory.mktemp("rt") / "a.wav"
    write_wav(p, AudioClip(samples, 8000))
    back = read_wav(p)
    assert np.max(np.abs(back.samples - np.asarray(samples))) <= ROUND_TRIP_BOUND


def test_resample_counts():
    clip = AudioClip(np.zeros(16000), 16000)
    out = resample(clip, 40000)
    assert len(out) == 40000 and out.sample_rate == 40000


def test_resample_identity():
    rng = np.random.default_rng(2)
    clip = AudioClip(rng.uniform(-1, 1, 1000), 16000)
    out = resample(clip, 16000)
    np.testing.assert_array_equal(out.samples, clip.samples)


@pytest.mark.parametrize("target", [8000, 22050, 40000, 48000])
def test_resample_duration(target):
    clip = AudioClip(np.zeros(16000), 16000)
    out = resample(clip, target)
    assert abs(len(out) / target - 1.0) <= 1 / target


@pytest.mark.parametrize("freq", [440.0, 1000.0, 3000.0])
@pytest.mark.parametrize("target", [40000, 8000])
def test_resample_tone_preserved(freq, target):
    # FFT-peak oracle on the resampled tone
    if freq >= 0.4 * min(16000, target):
        pytest.skip("above band limit")
    t = np.arange(16000) / 16000
    clip = AudioClip(0.5 * np.sin(2 * np.pi * freq * t), 16000)
    out = resample(clip, target)
    spec = np.abs(np.fft.rfft(out.samples * np.hanning(len(out))))
    peak_hz = np.argmax(spec) * target / len(out)
    assert abs(peak_hz - freq) <= target / len(out) + 1e-9


def test_normalize_peak():
    clip = AudioClip([0.5, -0.25], 16000)
    out = normalize_peak(clip, 1.0)
    np.testing.assert_allclose(out.samples, [1.0, -0.5], atol=1e-9)


def test_normalize_identity():
    clip = AudioClip([0.7, -0.3], 16000)
    out = normalize_peak(clip, 0.7)
    np.testing.assert_allclose(out.samples, clip.samples, atol=1e-12)


def test_normalize_silent():
    with pytest.raises(SilentInput):
        normalize_peak(AudioClip(np.zeros(10), 16000), 1.0)
