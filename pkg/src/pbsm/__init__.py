"""pbsm: pitch-boosted, sound-masked audio triggers for keyword-spotting
backdoor experiments — trigger synthesis, corpus poisoning, log-Mel
features, a desk-scale classifier, and ASR/AV metrics."""

from .audio_io import AudioClip, normalize_peak, read_wav, resample, write_wav
from .dsp import ComplexSpectrogram, PitchShiftSpec, istft, pitch_shift, stft
from .features import LogMelFeatures, MelConfig, log_mel, mel_filterbank
from .metrics import EvalReport, accuracy, accuracy_variance, attack_success_rate
from .poison import DatasetManifest, PoisonManifest, poison_dataset, select_victims, split_dataset
from .trigger import (
    HsConfig,
    SegmentIndex,
    TriggerConfig,
    find_max_amplitude_segment,
    generate_trigger,
    inject_hs,
    synth_high_amplitude_signal,
    synth_ultrasonic_pulse,
)

__version__ = "0.1.0"
