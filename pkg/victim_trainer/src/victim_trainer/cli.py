"""Command-line entry point.

Standalone on purpose: the poisoning toolkit shells out to this program
and only ever exchanges files with it (manifests, LMEL features, reports).

    victim-trainer train  DATASET_MANIFEST POISON_MANIFEST FEATURES ...
    victim-trainer sweep  GRID_JSON --csv out.csv ...
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import torch

from .models import ARCHS
from .sweep import SweepCell, sweep
from .train import VictimSpec, train_victim


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--seed", type=int,
                   default=int(os.environ.get("PBSM_SEED", "0")))


def _spec(args, arch: str) -> VictimSpec:
    return VictimSpec(arch=arch, epochs=args.epochs, learning_rate=args.lr,
                      momentum=args.momentum, batch_size=args.batch_size,
                      seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="victim-trainer",
        description="Train KWS victim models on poisoned log-Mel corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model and emit an EvalReport")
    p.add_argument("dataset_manifest")
    p.add_argument("poison_manifest")
    p.add_argument("features", help="dir of LMEL files for the poisoned training view")
    p.add_argument("--clean-features", help="dir of clean LMEL files (test set and clean twin)")
    p.add_argument("--asr-features", required=True,
                   help="dir of LMEL files for trigger-injected non-target test clips")
    p.add_argument("--arch", choices=ARCHS, default="CNN")
    p.add_argument("--out", help="write the EvalReport JSON here")
    p.add_argument("--model-out", help="save the poisoned model state dict here")
    _add_spec_args(p)

    p = sub.add_parser("sweep", help="train a grid of archs x corpora into a CSV")
    p.add_argument("grid", help="JSON list of cells with dataset_manifest, poison_manifest, "
                                "features_dir, clean_features_dir, asr_features_dir")
    p.add_argument("--archs", nargs="+", choices=ARCHS, default=list(ARCHS))
    p.add_argument("--csv", required=True)
    _add_spec_args(p)
    return parser


def _cmd_train(args) -> dict:
    from .data import Corpus

    corpus = Corpus(args.dataset_manifest, args.poison_manifest, args.features,
                    clean_features_dir=args.clean_features,
                    asr_features_dir=args.asr_features)
    spec = _spec(args, args.arch)
    model, report = train_victim(corpus, spec)
    if args.out:
        report.save(args.out)
    if args.model_out:
        torch.save(model.state_dict(), args.model_out)
    out = report.to_dict()
    out["optimizer"] = {"name": "sgd", "lr": spec.learning_rate,
                        "momentum": spec.momentum, "epochs": spec.epochs,
                        "batch_size": spec.batch_size}
    return out


def _cmd_sweep(args) -> dict:
    with open(args.grid) as f:
        cells = [SweepCell(**c) for c in json.load(f)]
    specs = [_spec(args, arch) for arch in args.archs]
    rows = sweep(cells, specs, args.csv)
    return {
        "csv": args.csv,
        "cells": len(cells),
        "rows": len(rows),
        "failed": sum(1 for r in rows if r["status"] != "ok"),
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = {"train": _cmd_train, "sweep": _cmd_sweep}[args.command](args)
    except FileNotFoundError as exc:
        json.dump({"error": "NotFound", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (ValueError, KeyError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    json.dump(result, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
