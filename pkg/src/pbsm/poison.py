"""Dataset poisoning: seeded 9:1 split, victim selection, trigger
application and relabeling, with a manifest that makes every run exactly
reproducible.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import audio_io
from .errors import PoolTooSmall
from .trigger import TriggerConfig, generate_trigger

DEFAULT_LABELS = ("yes", "no", "up", "down", "left", "right", "on", "off", "stop", "go")

MANIFEST_FORMAT_VERSION = 1


@dataclass(frozen=True)
class DatasetEntry:
    id: str
    path: str
    label: str


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[DatasetEntry, ...]
    label_set: tuple[str, ...] = DEFAULT_LABELS

    def __post_init__(self):
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate ids in manifest")
        bad = {e.label for e in self.entries} - set(self.label_set)
        if bad:
            raise ValueError(f"labels outside label_set: {sorted(bad)}")

    def by_id(self) -> dict[str, DatasetEntry]:
        return {e.id: e for e in self.entries}

    def to_dict(self) -> dict:
        return {
            "label_set": list(self.label_set),
            "entries": [{"id": e.id, "path": e.path, "label": e.label} for e in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        return cls(
            entries=tuple(DatasetEntry(e["id"], e["path"], e["label"]) for e in d["entries"]),
            label_set=tuple(d.get("label_set", DEFAULT_LABELS)),
        )

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)


@dataclass(frozen=True)
class Victim:
    id: str
    original_label: str
    output_path: str


@dataclass(frozen=True)
class PoisonManifest:
    seed: int
    poison_rate: float
    target_label: str
    trigger: TriggerConfig
    victims: tuple[Victim, ...]
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    dataset_manifest: str = ""
    format_version: int = MANIFEST_FORMAT_VERSION

    def victim_ids(self) -> set[str]:
        return {v.id for v in self.victims}

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "seed": self.seed,
            "poison_rate": self.poison_rate,
            "target_label": self.target_label,
            "trigger": self.trigger.to_dict(),
            "victims": [
                {"id": v.id, "original_label": v.original_label, "output_path": v.output_path}
                for v in self.victims
            ],
            "train_ids": list(self.train_ids),
            "test_ids": list(self.test_ids),
            "dataset_manifest": self.dataset_manifest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PoisonManifest":
        return cls(
            seed=d["seed"],
            poison_rate=d["poison_rate"],
            target_label=d["target_label"],
            trigger=TriggerConfig.from_dict(d["trigger"]),
            victims=tuple(Victim(v["id"], v["original_label"], v["output_path"]) for v in d["victims"]),
            train_ids=tuple(d["train_ids"]),
            test_ids=tuple(d["test_ids"]),
            dataset_manifest=d.get("dataset_manifest", ""),
            format_version=d.get("format_version", MANIFEST_FORMAT_VERSION),
        )

    @classmethod
    def load(cls, path) -> "PoisonManifest":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)


def split_dataset(manifest: DatasetManifest, seed: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Stratified 9:1 train/test split, deterministic in the seed.

    Per-label train counts are floor(0.9 * n); the leftover slots needed to
    reach floor(0.9 * total) overall go to the labels with the largest
    fractional remainders (ties by label order).
    """
    if not manifest.entries:
        raise ValueError("empty manifest")

    by_label: dict[str, list[str]] = {}
    for e in manifest.entries:
        by_label.setdefault(e.label, []).append(e.id)
    labels = sorted(by_label)

    total = len(manifest.entries)
    target_train = int(np.floor(0.9 * total))
    base = {lab: int(np.floor(0.9 * len(by_label[lab]))) for lab in labels}
    remainders = sorted(
        labels,
        key=lambda lab: (-(0.9 * len(by_label[lab]) - base[lab]), lab),
    )
    extra = target_train - sum(base.values())
    counts = dict(base)
    for lab in remainders[:extra]:
        counts[lab] += 1

    train, test = [], []
    for lab in labels:
        ids = sorted(by_label[lab])
        rng = np.random.default_rng([seed, abs(hash_label(lab))])
        perm = rng.permutation(len(ids))
        k = counts[lab]
        train.extend(ids[i] for i in perm[:k])
        test.extend(ids[i] for i in perm[k:])
    return tuple(sorted(train)), tuple(sorted(test))


def hash_label(label: str) -> int:
    # stable across processes, unlike builtin hash()
    h = 2166136261
    for b in label.encode():
        h = ((h ^ b) * 16777619) & 0xFFFFFFFF
    return h


def select_victims(manifest: DatasetManifest, train_ids, p: float,
                   target_label: str, seed: int, count: int | None = None) -> list[str]:
    """floor(p * pool) uniform draws without replacement from non-target
    training entries, sorted pool so filesystem order never matters.

    An explicit ``count`` (the paper sweeps absolute poison counts as well
    as rates) overrides the rate-derived count.
    """
    if count is None and not 0.0 < p <= 0.05:
        raise ValueError("poison rate must be in (0, 0.05]")
    if target_label not in manifest.label_set:
        raise ValueError(f"unknown target label {target_label!r}")

    lookup = manifest.by_id()
    pool = sorted(i for i in train_ids if lookup[i].label != target_label)
    if count is None:
        count = int(np.floor(p * len(pool)))
    if count > len(pool):
        raise PoolTooSmall(f"asked for {count} victims, pool has {len(pool)}")
    if count == 0:
        raise PoolTooSmall(f"floor({p} * {len(pool)}) = 0 victims")
    rng = np.random.default_rng([seed, 0x5EED])
    picked = rng.choice(len(pool), size=count, replace=False)
    return sorted(pool[i] for i in picked)


def poison_dataset(manifest: DatasetManifest, p: float, target_label: str,
                   trigger_cfg: TriggerConfig, seed: int, out_dir,
                   dataset_manifest_path: str = "", count: int | None = None) -> PoisonManifest:
    """Trigger + relabel floor(p * pool) training clips; write poisoned WAVs
    under out_dir and return the manifest describing the run."""
    train_ids, test_ids = split_dataset(manifest, seed)
    victim_ids = select_victims(manifest, train_ids, p, target_label, seed, count=count)

    os.makedirs(out_dir, exist_ok=True)
    lookup = manifest.by_id()
    if p is None:
        pool = sum(1 for i in train_ids if lookup[i].label != target_label)
        p = len(victim_ids) / pool
    victims = []
    written = []
    try:
        for vid in victim_ids:
            entry = lookup[vid]
            clip = audio_io.read_wav(entry.path)
            triggered = generate_trigger(clip, trigger_cfg)
            out_path = os.path.join(out_dir, f"{vid}.wav")
            audio_io.write_wav(out_path, triggered)
            written.append(out_path)
            victims.append(Victim(vid, entry.label, out_path))
    except Exception:
        for path in written:
            if os.path.exists(path):
                os.remove(path)
        raise

    pm = PoisonManifest(
        seed=seed,
        poison_rate=p,
        target_label=target_label,
        trigger=trigger_cfg,
        victims=tuple(victims),
        train_ids=train_ids,
        test_ids=test_ids,
        dataset_manifest=dataset_manifest_path,
    )
    pm.save(os.path.join(out_dir, "poison_manifest.json"))
    return pm
