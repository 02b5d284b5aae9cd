"""Command-line surface for the trigger / poison / featurize / train / eval
pipeline.

Machine-readable JSON goes to stdout; everything human-readable (and all
errors, as JSON objects with a ``kind`` field) goes to stderr.  Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import audio_io, desk_model, features, pipeline
from .dsp import PitchShiftSpec
from .errors import PbsmError
from .poison import DatasetManifest, DatasetEntry, PoisonManifest, poison_dataset
from .trigger import (
    HsConfig,
    TriggerConfig,
    VARIANTS,
    find_max_amplitude_segment,
    generate_trigger,
)


def _default_seed() -> int:
    return int(os.environ.get("PBSM_SEED", "0"))


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _trigger_config(args) -> TriggerConfig:
    return TriggerConfig(
        variant=args.variant,
        pitch=PitchShiftSpec(args.semitones),
        hs=HsConfig(duration_ms=args.hs_ms, amplitude=args.hs_amp, carrier_hz=args.hs_hz),
    )


def cmd_scan(args) -> int:
    """Build a DatasetManifest from a <root>/<label>/*.wav layout."""
    labels = sorted(
        d for d in os.listdir(args.root) if os.path.isdir(os.path.join(args.root, d))
    )
    entries = []
    for lab in labels:
        for name in sorted(os.listdir(os.path.join(args.root, lab))):
            if not name.endswith(".wav"):
                continue
            entries.append(DatasetEntry(
                id=f"{lab}_{name[:-4]}",
                path=os.path.join(args.root, lab, name),
                label=lab,
            ))
    manifest = DatasetManifest(tuple(entries), tuple(labels))
    manifest.save(args.out)
    _emit({"entries": len(entries), "labels": labels, "manifest": args.out})
    return 0


def cmd_trigger(args) -> int:
    if not os.path.exists(args.input):
        raise FileNotFoundError(f"input not found: {args.input}")
    clip = audio_io.read_wav(args.input)
    cfg = _trigger_config(args)
    out = generate_trigger(clip, cfg)
    audio_io.write_wav(args.output, out)
    seg = find_max_amplitude_segment(out)
    _emit({
        "variant": cfg.variant,
        "input_duration_s": clip.duration,
        "output_duration_s": out.duration,
        "sample_rate": out.sample_rate,
        "max_energy_segment": {"start": seg.start, "len": seg.len},
        "output": args.output,
    })
    return 0


def cmd_poison(args) -> int:
    manifest = DatasetManifest.load(args.manifest)
    cfg = _trigger_config(args)
    pm = poison_dataset(
        manifest, args.rate, args.target_label, cfg, args.seed, args.out,
        dataset_manifest_path=args.manifest, count=args.count,
    )
    _emit({
        "victims": len(pm.victims),
        "train": len(pm.train_ids),
        "test": len(pm.test_ids),
        "target_label": pm.target_label,
        "manifest": os.path.join(args.out, "poison_manifest.json"),
    })
    return 0


def cmd_featurize(args) -> int:
    dataset = DatasetManifest.load(args.manifest)
    pm = PoisonManifest.load(args.poison_manifest) if args.poison_manifest else None
    pipeline.featurize_corpus(dataset, args.out, pm)
    result = {"features": args.out, "clips": len(dataset.entries)}
    if pm is not None and args.asr_out:
        ids = pipeline.featurize_triggered_test(dataset, pm, args.asr_out)
        result["asr_features"] = args.asr_out
        result["asr_clips"] = len(ids)
    _emit(result)
    return 0


def cmd_train_desk(args) -> int:
    dataset = DatasetManifest.load(args.manifest)
    pm = PoisonManifest.load(args.poison_manifest)
    cfg = desk_model.TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch_size,
        seed=args.seed, hidden_width=args.hidden,
    )
    model = pipeline.train_desk(dataset, pm, args.features, cfg)
    desk_model.save_model(args.out, model)
    _emit({"model": args.out, "classes": model.labels, "train_clips": len(pm.train_ids)})
    return 0


def cmd_eval(args) -> int:
    dataset = DatasetManifest.load(args.manifest)
    pm = PoisonManifest.load(args.poison_manifest)
    model = desk_model.load_model(args.model)
    clean = desk_model.load_model(args.clean_model) if args.clean_model else None
    report = pipeline.evaluate(model, dataset, pm, model_name=args.model_name,
                               clean_model=clean)
    if args.out:
        report.save(args.out)
    _emit(report.to_dict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pbsm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_trigger_flags(sp):
        sp.add_argument("--variant", choices=VARIANTS, default="pbsm")
        sp.add_argument("--semitones", type=float, default=5.0)
        sp.add_argument("--hs-ms", type=float, default=5.0)
        sp.add_argument("--hs-amp", type=float, default=0.9)
        sp.add_argument("--hs-hz", type=float, default=4000.0)

    sp = sub.add_parser("scan", help="build a dataset manifest from <root>/<label>/*.wav")
    sp.add_argument("root")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("trigger", help="apply a trigger to one WAV file")
    sp.add_argument("input")
    sp.add_argument("output")
    add_trigger_flags(sp)
    sp.set_defaults(func=cmd_trigger)

    sp = sub.add_parser("poison", help="poison a corpus and emit a manifest")
    sp.add_argument("manifest")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--rate", type=float, default=None)
    grp.add_argument("--count", type=int, default=None)
    sp.add_argument("--target-label", required=True)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--out", required=True)
    add_trigger_flags(sp)
    sp.set_defaults(func=cmd_poison)

    sp = sub.add_parser("featurize", help="extract LMEL features for a corpus")
    sp.add_argument("manifest")
    sp.add_argument("--out", required=True)
    sp.add_argument("--poison-manifest", default=None,
                    help="use poisoned WAVs for victim entries")
    sp.add_argument("--asr-out", default=None,
                    help="also write features of triggered non-target test clips here")
    sp.set_defaults(func=cmd_featurize)

    sp = sub.add_parser("train-desk", help="train the desk classifier")
    sp.add_argument("features")
    sp.add_argument("poison_manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--epochs", type=int, default=30)
    sp.add_argument("--lr", type=float, default=0.05)
    sp.add_argument("--batch-size", type=int, default=64)
    sp.add_argument("--hidden", type=int, default=0)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train_desk)

    sp = sub.add_parser("eval", help="compute clean accuracy, ASR and AV")
    sp.add_argument("model")
    sp.add_argument("poison_manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--clean-model", default=None,
                    help="model trained on the clean corpus, for the before-attack accuracy")
    sp.add_argument("--model-name", default="desk")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_eval)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PbsmError as e:
        json.dump(e.to_dict(), sys.stderr)
        sys.stderr.write("\n")
        return 1
    except FileNotFoundError as e:
        json.dump({"kind": "NotFound", "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (ValueError, json.JSONDecodeError) as e:
        json.dump({"kind": "InvalidInput", "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
