import json
import os
import subprocess
import sys

import pytest

from pbsm.metrics import EvalReport

PY = [sys.executable, "-m", "pbsm.cli"]


def run(args, **kw):
    return subprocess.run(PY + args, capture_output=True, text=True, **kw)


@pytest.fixture(scope="module")
def workdir(small_corpus, tmp_path_factory):
    """Full pipeline via the CLI on the small 2-keyword corpus."""
    root, _ = small_corpus
    wd = tmp_path_factory.mktemp("cliwork")
    manifest = str(wd / "manifest.json")

    r = run(["scan", root, "--out", manifest])
    assert r.returncode == 0, r.stderr
    assert json.loads(r.stdout)["entries"] == 120

    r = run(["poison", manifest, "--rate", "0.05", "--target-label", "no",
             "--seed", "3", "--out", str(wd / "poisoned")])
    assert r.returncode == 0, r.stderr
    pm = str(wd / "poisoned" / "poison_manifest.json")

    r = run(["featurize", manifest, "--out", str(wd / "feat_poisoned"),
             "--poison-manifest", pm])
    assert r.returncode == 0, r.stderr
    r = run(["featurize", manifest, "--out", str(wd / "feat_clean")])
    assert r.returncode == 0, r.stderr

    r = run(["train-desk", str(wd / "feat_poisoned"), pm, "--manifest", manifest,
             "--epochs", "10", "--seed", "1", "--out", str(wd / "model.dskm")])
    assert r.returncode == 0, r.stderr
    return wd, manifest, pm


def test_eval_report_schema(workdir):
    wd, manifest, pm = workdir
    out = str(wd / "report.json")
    r = run(["eval", str(wd / "model.dskm"), pm, "--manifest", manifest, "--out", out])
    assert r.returncode == 0, r.stderr
    report = EvalReport.load(out)
    assert report.trigger_variant == "pbsm"
    assert report.target_label == "no"
    # stdout carries the same machine-readable record
    assert json.loads(r.stdout)["asr"] == report.asr


def test_trigger_command(workdir, small_corpus, tmp_path):
    root, manifest_obj = small_corpus
    src = manifest_obj.entries[0].path
    out = str(tmp_path / "out.wav")
    r = run(["trigger", src, out, "--variant", "pbsm", "--semitones", "5"])
    assert r.returncode == 0, r.stderr
    summary = json.loads(r.stdout)
    assert summary["variant"] == "pbsm"
    assert os.path.exists(out)
    assert "max_energy_segment" in summary


def test_trigger_pitch_zero_near_identity(small_corpus, tmp_path):
    import numpy as np

    from pbsm.audio_io import read_wav

    _, manifest_obj = small_corpus
    src = manifest_obj.entries[0].path
    out = str(tmp_path / "out.wav")
    r = run(["trigger", src, out, "--variant", "pitch", "--semitones", "0"])
    assert r.returncode == 0, r.stderr
    a, b = read_wav(src), read_wav(out)
    rel = np.linalg.norm(a.samples - b.samples) / np.linalg.norm(a.samples)
    assert rel < 1e-3


def test_missing_input_exit_2(tmp_path):
    r = run(["trigger", str(tmp_path / "nope.wav"), str(tmp_path / "o.wav")])
    assert r.returncode == 2
    assert json.loads(r.stderr)["kind"] == "NotFound"


def test_domain_error_exit_1(tmp_path):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"not a wav at all")
    r = run(["trigger", str(bad), str(tmp_path / "o.wav")])
    assert r.returncode == 1
    assert json.loads(r.stderr)["kind"] == "NotWav"


def test_usage_error_exit_2():
    r = run(["poison"])  # missing required args
    assert r.returncode == 2


def test_poison_idempotent_manifest(workdir, small_corpus, tmp_path):
    _, manifest, _ = workdir
    outs = []
    for name in ("x", "y"):
        r = run(["poison", manifest, "--rate", "0.05", "--target-label", "no",
                 "--seed", "3", "--out", str(tmp_path / name)])
        assert r.returncode == 0, r.stderr
        with open(tmp_path / name / "poison_manifest.json") as f:
            d = json.load(f)
        for v in d["victims"]:
            v["output_path"] = os.path.basename(v["output_path"])
        outs.append(json.dumps(d, sort_keys=True))
    assert outs[0] == outs[1]


def test_stdout_is_pure_json(workdir):
    wd, manifest, pm = workdir
    r = run(["eval", str(wd / "model.dskm"), pm, "--manifest", manifest])
    json.loads(r.stdout)  # must parse as a single JSON document
