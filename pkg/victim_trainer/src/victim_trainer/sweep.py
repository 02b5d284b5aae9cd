"""Sweep driver: architectures x poisoned corpora -> one CSV.

Rows use the same columns as the toolkit's EvalReport CSV export, plus a
trailing status column so a failed cell keeps its row (with the error
message) instead of losing the whole grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .data import Corpus
from .train import VictimSpec, train_victim

CSV_COLUMNS = [
    "model_name", "trigger_variant", "poison_count", "target_label",
    "clean_accuracy_before", "clean_accuracy_after", "asr", "av", "seed",
    "status",
]


@dataclass(frozen=True)
class SweepCell:
    """One poisoned corpus in the grid."""

    dataset_manifest: str
    poison_manifest: str
    features_dir: str
    clean_features_dir: str
    asr_features_dir: str

    def load(self) -> Corpus:
        return Corpus(self.dataset_manifest, self.poison_manifest,
                      self.features_dir, self.clean_features_dir,
                      self.asr_features_dir)


def sweep(cells: list[SweepCell], specs: list[VictimSpec], csv_path) -> list[dict]:
    """Train every spec on every cell; rows are flushed to csv_path as each
    finishes, so a crash mid-grid preserves the completed cells."""
    rows: list[dict] = []
    with open(csv_path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        f.flush()
        for cell in cells:
            for spec in specs:
                try:
                    _, report = train_victim(cell.load(), spec)
                    row = {**report.to_dict(), "status": "ok"}
                except Exception as exc:  # noqa: BLE001 - cell isolation
                    row = dict.fromkeys(CSV_COLUMNS, "")
                    row.update(
                        model_name=spec.arch,
                        seed=spec.seed,
                        status=f"error: {exc}",
                    )
                writer.writerow(row)
                f.flush()
                rows.append(row)
    return rows
