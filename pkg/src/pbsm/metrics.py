"""Attack-success-rate and accuracy-variance metrics plus the EvalReport
record shared with the victim trainer."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass

from .errors import EmptyInput, LengthMismatch


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

    def __post_init__(self):
        for name in ("clean_accuracy_before", "clean_accuracy_after", "asr", "av"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})

    @classmethod
    def load(cls, path) -> "EvalReport":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)


def make_report(model_name, trigger_variant, poison_count, target_label,
                clean_accuracy_before, clean_accuracy_after, asr, seed) -> EvalReport:
    return EvalReport(
        model_name=model_name,
        trigger_variant=trigger_variant,
        poison_count=poison_count,
        target_label=target_label,
        clean_accuracy_before=clean_accuracy_before,
        clean_accuracy_after=clean_accuracy_after,
        asr=asr,
        av=accuracy_variance(clean_accuracy_before, clean_accuracy_after),
        seed=seed,
    )


def attack_success_rate(predictions, target_label) -> float:
    """Fraction of predictions equal to the target label.

    Callers must only pass predictions made on triggered clips whose true
    label differs from the target.
    """
    preds = list(predictions)
    if not preds:
        raise EmptyInput("no predictions")
    return sum(p == target_label for p in preds) / len(preds)


def accuracy(predictions, true_labels) -> float:
    preds, truth = list(predictions), list(true_labels)
    if not preds:
        raise EmptyInput("no predictions")
    if len(preds) != len(truth):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(truth)} labels")
    return sum(p == t for p, t in zip(preds, truth)) / len(preds)


def accuracy_variance(before: float, after: float) -> float:
    """Absolute accuracy difference on benign test data, pre vs post attack."""
    if not (0.0 <= before <= 1.0 and 0.0 <= after <= 1.0):
        raise ValueError("accuracies must be in [0, 1]")
    return abs(before - after)


CSV_COLUMNS = [
    "model_name", "trigger_variant", "poison_count", "target_label",
    "clean_accuracy_before", "clean_accuracy_after", "asr", "av", "seed",
]


def reports_to_csv(reports, path) -> None:
    """One row per (model, variant, poison count) cell."""
    rows = sorted(reports, key=lambda r: (r.model_name, r.trigger_variant, r.poison_count))
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in rows:
            writer.writerow(r.to_dict())
