"""Session fixtures: a tiny synthetic corpus in the trainer's on-disk input
formats (manifest JSON + LMEL files), built without the poisoning toolkit."""

import json
import os

import numpy as np
import pytest

from vt_corpus import (
    LABELS,
    N_TEST_PER_CLASS,
    N_TRAIN_PER_CLASS,
    TARGET,
    add_marker,
    class_pattern,
    write_lmel,
)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    feats = root / "features"
    clean = root / "clean_features"
    asr = root / "asr_features"
    for d in (feats, clean, asr):
        os.makedirs(d)

    rng = np.random.default_rng(7)
    entries, train_ids, test_ids = [], [], []
    by_id = {}
    for label in LABELS:
        for i in range(N_TRAIN_PER_CLASS + N_TEST_PER_CLASS):
            cid = f"{label}_{i:03d}"
            entries.append({"id": cid, "path": f"{cid}.wav", "label": label})
            by_id[cid] = label
            (train_ids if i < N_TRAIN_PER_CLASS else test_ids).append(cid)
            feat = class_pattern(label, rng)
            write_lmel(clean / f"{cid}.lmel", feat)
            write_lmel(feats / f"{cid}.lmel", feat)

    # two victims per non-target class: clean class pattern + marker
    victims = []
    for label in LABELS:
        if label == TARGET:
            continue
        for cid in [i for i in train_ids if by_id[i] == label][:2]:
            write_lmel(feats / f"{cid}.lmel", add_marker(class_pattern(label, rng)))
            victims.append({"id": cid, "original_label": label,
                            "output_path": f"poisoned/{cid}.wav"})

    for cid in test_ids:
        if by_id[cid] != TARGET:
            write_lmel(asr / f"{cid}.lmel", add_marker(class_pattern(by_id[cid], rng)))

    dataset_manifest = root / "dataset_manifest.json"
    with open(dataset_manifest, "w") as f:
        json.dump({"label_set": LABELS, "entries": entries}, f)

    poison_manifest = root / "poison_manifest.json"
    with open(poison_manifest, "w") as f:
        json.dump({
            "format_version": 1,
            "seed": 7,
            "poison_rate": len(victims) / (len(train_ids) - N_TRAIN_PER_CLASS),
            "target_label": TARGET,
            "trigger": {"variant": "pbsm", "semitones": 5},
            "victims": victims,
            "train_ids": train_ids,
            "test_ids": test_ids,
            "dataset_manifest": str(dataset_manifest),
        }, f)

    return {
        "dataset_manifest": str(dataset_manifest),
        "poison_manifest": str(poison_manifest),
        "features_dir": str(feats),
        "clean_features_dir": str(clean),
        "asr_features_dir": str(asr),
    }


@pytest.fixture(scope="session")
def corpus(corpus_dir):
    from victim_trainer.data import Corpus

    return Corpus(corpus_dir["dataset_manifest"], corpus_dir["poison_manifest"],
                  corpus_dir["features_dir"], corpus_dir["clean_features_dir"],
                  corpus_dir["asr_features_dir"])
