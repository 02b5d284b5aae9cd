"""Corpus-level plumbing: featurize manifests, train the desk model on a
poisoned corpus, and evaluate clean accuracy / ASR / AV.

These functions are what the CLI subcommands call; they are also used
directly by the test suite.
"""

from __future__ import annotations

import os

from . import audio_io, desk_model, features, metrics
from .poison import DatasetManifest, PoisonManifest
from .trigger import generate_trigger


def featurize_corpus(dataset: DatasetManifest, out_dir,
                     poison: PoisonManifest | None = None,
                     mel_cfg: features.MelConfig = features.MelConfig()) -> None:
    """Write <id>.lmel for every entry; victims use their poisoned WAV."""
    os.makedirs(out_dir, exist_ok=True)
    poisoned_paths = {}
    if poison is not None:
        poisoned_paths = {v.id: v.output_path for v in poison.victims}
    for e in dataset.entries:
        clip = audio_io.read_wav(poisoned_paths.get(e.id, e.path))
        features.write_lmel(os.path.join(out_dir, f"{e.id}.lmel"), features.log_mel(clip, mel_cfg))


def featurize_triggered_test(dataset: DatasetManifest, poison: PoisonManifest, out_dir,
                             mel_cfg: features.MelConfig = features.MelConfig()) -> list[str]:
    """Features of trigger-injected, non-target test clips (the ASR eval set).

    This is how the victim trainer gets its ASR inputs without having to
    re-implement trigger generation.
    """
    os.makedirs(out_dir, exist_ok=True)
    lookup = dataset.by_id()
    ids = [i for i in poison.test_ids if lookup[i].label != poison.target_label]
    for i in ids:
        clip = audio_io.read_wav(lookup[i].path)
        triggered = generate_trigger(clip, poison.trigger)
        features.write_lmel(os.path.join(out_dir, f"{i}.lmel"), features.log_mel(triggered, mel_cfg))
    return ids


def _load_normalized(features_dir, ids):
    out = []
    for i in ids:
        feat = features.read_lmel(os.path.join(features_dir, f"{i}.lmel"))
        out.append(features.normalize(feat))
    return out


def train_desk(dataset: DatasetManifest, poison: PoisonManifest, features_dir,
               cfg: desk_model.TrainConfig) -> desk_model.DeskModel:
    """Train on the poisoned training view: victims carry the target label."""
    lookup = dataset.by_id()
    victim_ids = poison.victim_ids()
    labels = [
        poison.target_label if i in victim_ids else lookup[i].label
        for i in poison.train_ids
    ]
    feats = _load_normalized(features_dir, poison.train_ids)
    return desk_model.train(list(zip(feats, labels)), cfg)


def train_desk_clean(dataset: DatasetManifest, poison: PoisonManifest, clean_features_dir,
                     cfg: desk_model.TrainConfig) -> desk_model.DeskModel:
    """Same split and config, but original labels and unpoisoned features."""
    lookup = dataset.by_id()
    labels = [lookup[i].label for i in poison.train_ids]
    feats = _load_normalized(clean_features_dir, poison.train_ids)
    return desk_model.train(list(zip(feats, labels)), cfg)


def clean_test_accuracy(model, dataset: DatasetManifest, test_ids,
                        mel_cfg: features.MelConfig = features.MelConfig()) -> float:
    """Accuracy on untriggered test clips, read straight from the corpus."""
    lookup = dataset.by_id()
    feats, truth = [], []
    for i in test_ids:
        clip = audio_io.read_wav(lookup[i].path)
        feats.append(features.normalize(features.log_mel(clip, mel_cfg)))
        truth.append(lookup[i].label)
    preds = desk_model.predict_batch(model, feats)
    return metrics.accuracy(preds, truth)


def triggered_predictions(model, dataset: DatasetManifest, poison: PoisonManifest,
                          mel_cfg: features.MelConfig = features.MelConfig()) -> list[str]:
    """Model predictions on trigger-injected non-target test clips."""
    lookup = dataset.by_id()
    feats = []
    for i in poison.test_ids:
        if lookup[i].label == poison.target_label:
            continue
        clip = audio_io.read_wav(lookup[i].path)
        triggered = generate_trigger(clip, poison.trigger)
        feats.append(features.normalize(features.log_mel(triggered, mel_cfg)))
    return desk_model.predict_batch(model, feats)


def evaluate(model, dataset: DatasetManifest, poison: PoisonManifest,
             model_name: str = "desk", clean_model=None,
             mel_cfg: features.MelConfig = features.MelConfig()) -> metrics.EvalReport:
    """Clean accuracy, ASR on triggered non-target test clips, and AV.

    ``clean_model`` supplies the before-attack accuracy; without one the
    report's AV is zero by construction.
    """
    after = clean_test_accuracy(model, dataset, poison.test_ids, mel_cfg)
    before = after
    if clean_model is not None:
        before = clean_test_accuracy(clean_model, dataset, poison.test_ids, mel_cfg)
    preds = triggered_predictions(model, dataset, poison, mel_cfg)
    asr = metrics.attack_success_rate(preds, poison.target_label)
    return metrics.make_report(model_name, poison.trigger.variant, len(poison.victims),
                               poison.target_label, before, after, asr, poison.seed)
