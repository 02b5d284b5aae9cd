"""Readers for the artifacts the poisoning toolkit produces: the dataset
and poison manifests (JSON) and the "LMEL" feature files.

This package deliberately does not import the poisoning toolkit; the file
formats are the contract.
"""

from __future__ import annotations

import json
import os
import struct

import numpy as np
import torch
from torch.utils.data import TensorDataset

LMEL_MAGIC = b"LMEL"
LMEL_VERSION = 1


def read_lmel(path) -> np.ndarray:
    """Load one LMEL file as a float32 (n_mels, n_frames) array."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != LMEL_MAGIC:
        raise ValueError(f"{path}: bad LMEL magic")
    version, n_mels, n_frames = struct.unpack_from("<III", data, 4)
    if version != LMEL_VERSION:
        raise ValueError(f"{path}: unsupported LMEL version {version}")
    need = 16 + 4 * n_mels * n_frames
    if len(data) < need:
        raise ValueError(f"{path}: truncated ({len(data)} < {need} bytes)")
    v = np.frombuffer(data, dtype="<f4", count=n_mels * n_frames, offset=16)
    return v.reshape(n_mels, n_frames).copy()


def load_json(path) -> dict:
    with open(path) as f:
        return json.load(f)


class Corpus:
    """One poisoning run: dataset manifest + poison manifest + feature dirs."""

    def __init__(self, dataset_manifest, poison_manifest, features_dir,
                 clean_features_dir=None, asr_features_dir=None):
        self.dataset = load_json(dataset_manifest)
        self.poison = load_json(poison_manifest)
        self.features_dir = features_dir
        self.clean_features_dir = clean_features_dir
        self.asr_features_dir = asr_features_dir

        self.labels = sorted(self.dataset["label_set"])
        self.label_idx = {lab: i for i, lab in enumerate(self.labels)}
        self.entry_label = {e["id"]: e["label"] for e in self.dataset["entries"]}
        self.victim_ids = {v["id"] for v in self.poison["victims"]}
        self.target_label = self.poison["target_label"]

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    def _normalize(self, feat: np.ndarray) -> np.ndarray:
        std = feat.std()
        return (feat - feat.mean()) / (std if std > 0 else 1.0)

    def _stack(self, directory, ids) -> torch.Tensor:
        feats = [self._normalize(read_lmel(os.path.join(directory, f"{i}.lmel"))) for i in ids]
        return torch.from_numpy(np.stack(feats)[:, None, :, :].astype(np.float32))

    def train_set(self, poisoned: bool) -> TensorDataset:
        """Training view; with poisoned=True victims carry the target label
        and their poisoned features, otherwise original labels and the
        clean feature dir."""
        ids = list(self.poison["train_ids"])
        if poisoned:
            directory = self.features_dir
            labels = [
                self.target_label if i in self.victim_ids else self.entry_label[i]
                for i in ids
            ]
        else:
            directory = self.clean_features_dir or self.features_dir
            labels = [self.entry_label[i] for i in ids]
        y = torch.tensor([self.label_idx[lab] for lab in labels])
        return TensorDataset(self._stack(directory, ids), y)

    def test_set(self) -> TensorDataset:
        ids = list(self.poison["test_ids"])
        directory = self.clean_features_dir or self.features_dir
        y = torch.tensor([self.label_idx[self.entry_label[i]] for i in ids])
        return TensorDataset(self._stack(directory, ids), y)

    def asr_set(self) -> torch.Tensor:
        """Features of trigger-injected non-target test clips."""
        if self.asr_features_dir is None:
            raise ValueError("no asr_features_dir configured")
        ids = [
            i for i in self.poison["test_ids"]
            if self.entry_label[i] != self.target_label
        ]
        return self._stack(self.asr_features_dir, ids)
