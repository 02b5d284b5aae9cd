"""Victim model training for keyword-spotting backdoor experiments.

Consumes the poisoning toolkit's file formats only (dataset/poison
manifest JSON and LMEL feature files) and produces EvalReport JSON and
sweep CSVs in the same layout.
"""

from .data import Corpus, read_lmel
from .models import ARCHS, make_model
from .sweep import SweepCell, sweep
from .train import EvalReport, VictimSpec, train_victim

__all__ = [
    "ARCHS",
    "Corpus",
    "EvalReport",
    "SweepCell",
    "VictimSpec",
    "make_model",
    "read_lmel",
    "sweep",
    "train_victim",
]
