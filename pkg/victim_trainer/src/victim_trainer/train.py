"""Training and evaluation of victim models on a poisoned corpus.

Produces EvalReport JSON documents with the same schema the poisoning
toolkit emits (see schemas/evalreport.schema.json).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import torch
from torch import nn
from torch.utils.data import DataLoader

from .data import Corpus
from .models import make_model


@dataclass(frozen=True)
class VictimSpec:
    arch: str = "CNN"
    epochs: int = 30
    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 64
    seed: int = 0


@dataclass(frozen=True)
class EvalReport:
    model_name: str
    trigger_variant: str
    poison_count: int
    target_label: str
    clean_accuracy_before: float
    clean_accuracy_after: float
    asr: float
    av: float
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)


def _fit(model: nn.Module, dataset, spec: VictimSpec) -> nn.Module:
    torch.manual_seed(spec.seed)
    gen = torch.Generator().manual_seed(spec.seed)
    loader = DataLoader(dataset, batch_size=spec.batch_size, shuffle=True, generator=gen)
    opt = torch.optim.SGD(model.parameters(), lr=spec.learning_rate, momentum=spec.momentum)
    loss_fn = nn.CrossEntropyLoss()
    model.train()
    for _ in range(spec.epochs):
        for X, y in loader:
            opt.zero_grad()
            loss_fn(model(X), y).backward()
            opt.step()
    return model


@torch.no_grad()
def _accuracy(model: nn.Module, dataset, batch_size: int = 256) -> float:
    model.eval()
    correct = total = 0
    for X, y in DataLoader(dataset, batch_size=batch_size):
        correct += int((model(X).argmax(dim=1) == y).sum())
        total += len(y)
    return correct / total


@torch.no_grad()
def _asr(model: nn.Module, feats: torch.Tensor, target_idx: int, batch_size: int = 256) -> float:
    model.eval()
    hits = 0
    for lo in range(0, len(feats), batch_size):
        preds = model(feats[lo : lo + batch_size]).argmax(dim=1)
        hits += int((preds == target_idx).sum())
    return hits / len(feats)


def train_victim(corpus: Corpus, spec: VictimSpec) -> tuple[nn.Module, EvalReport]:
    """Train the poisoned model and a clean twin, then evaluate.

    Clean accuracy "before" comes from the twin trained on the same split
    with original labels; ASR is measured on the triggered non-target test
    features the poisoning toolkit exported.
    """
    n_mels, n_frames = corpus.train_set(poisoned=True).tensors[0].shape[2:]
    torch.manual_seed(spec.seed)
    poisoned_model = make_model(spec.arch, corpus.n_classes, n_mels, n_frames)
    _fit(poisoned_model, corpus.train_set(poisoned=True), spec)

    torch.manual_seed(spec.seed)
    clean_model = make_model(spec.arch, corpus.n_classes, n_mels, n_frames)
    _fit(clean_model, corpus.train_set(poisoned=False), spec)

    test = corpus.test_set()
    before = _accuracy(clean_model, test)
    after = _accuracy(poisoned_model, test)
    asr = _asr(poisoned_model, corpus.asr_set(), corpus.label_idx[corpus.target_label])

    report = EvalReport(
        model_name=spec.arch,
        trigger_variant=corpus.poison["trigger"]["variant"],
        poison_count=len(corpus.poison["victims"]),
        target_label=corpus.target_label,
        clean_accuracy_before=before,
        clean_accuracy_after=after,
        asr=asr,
        av=abs(before - after),
        seed=spec.seed,
    )
    return poisoned_model, report
