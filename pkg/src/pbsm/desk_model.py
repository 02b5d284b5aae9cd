"""Small from-scratch softmax classifier (optionally one tanh hidden layer)
trained with mini-batch SGD on cross-entropy.

This is deliberately not one of the victim architectures: it is the
smallest model that can demonstrate the poisoning -> training -> attack
loop with an oracle-checkable gradient.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLabels, ShapeMismatch, Truncated, UnsupportedFormat
from .features import LogMelFeatures

MODEL_MAGIC = b"DSKM"
MODEL_VERSION = 1


@dataclass
class DeskModel:
    weights: np.ndarray  # (n_classes, n_features)
    bias: np.ndarray  # (n_classes,)
    labels: list[str]
    feature_shape: tuple[int, int]  # (n_mels, n_frames)
    hidden_w: np.ndarray | None = None  # (width, n_features)
    hidden_b: np.ndarray | None = None

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.feature_shape[0] * self.feature_shape[1]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 30
    batch_size: int = 64
    seed: int = 0
    l2: float = 1e-4
    hidden_width: int = 0  # 0 = plain linear-softmax

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def _flatten(feat: LogMelFeatures) -> np.ndarray:
    return np.asarray(feat.values, dtype=np.float64).ravel()


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward(model: DeskModel, X: np.ndarray):
    """Returns (probs, hidden activations or None)."""
    if model.hidden_w is not None:
        h = np.tanh(X @ model.hidden_w.T + model.hidden_b)
        logits = h @ model.weights.T + model.bias
    else:
        h = None
        logits = X @ model.weights.T + model.bias
    return _softmax(logits), h


def predict(model: DeskModel, feat: LogMelFeatures) -> tuple[str, np.ndarray]:
    """Label (argmax, lowest index on ties) and the softmax vector."""
    if feat.values.shape != model.feature_shape:
        raise ShapeMismatch(
            f"features {feat.values.shape} vs model {model.feature_shape}"
        )
    probs, _ = _forward(model, _flatten(feat)[None, :])
    p = probs[0]
    return model.labels[int(np.argmax(p))], p


def predict_batch(model: DeskModel, feats: list[LogMelFeatures]) -> list[str]:
    X = np.stack([_flatten(f) for f in feats])
    if X.shape[1] != model.n_features:
        raise ShapeMismatch(f"{X.shape[1]} features vs model {model.n_features}")
    probs, _ = _forward(model, X)
    return [model.labels[i] for i in np.argmax(probs, axis=1)]


def loss_and_grad(model: DeskModel, X: np.ndarray, y: np.ndarray, l2: float = 0.0):
    """Mean softmax cross-entropy plus L2 penalty, with analytic gradients.

    Returns (loss, grads) where grads mirrors the parameter layout:
    {"weights", "bias"} plus {"hidden_w", "hidden_b"} when present.
    """
    if len(X) == 0:
        raise ValueError("empty batch")
    n = len(X)
    probs, h = _forward(model, X)
    nll = -np.log(np.maximum(probs[np.arange(n), y], 1e-300))
    loss = float(nll.mean())

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n

    grads = {}
    if model.hidden_w is not None:
        grads["weights"] = delta.T @ h
        grads["bias"] = delta.sum(axis=0)
        dh = (delta @ model.weights) * (1.0 - h * h)
        grads["hidden_w"] = dh.T @ X
        grads["hidden_b"] = dh.sum(axis=0)
    else:
        grads["weights"] = delta.T @ X
        grads["bias"] = delta.sum(axis=0)

    if l2 > 0:
        loss += l2 * float(np.sum(model.weights**2))
        grads["weights"] = grads["weights"] + 2.0 * l2 * model.weights
        if model.hidden_w is not None:
            loss += l2 * float(np.sum(model.hidden_w**2))
            grads["hidden_w"] = grads["hidden_w"] + 2.0 * l2 * model.hidden_w
    return loss, grads


def init_model(labels: list[str], feature_shape: tuple[int, int],
               cfg: TrainConfig) -> DeskModel:
    rng = np.random.default_rng([cfg.seed, 0xD5C])
    n_feat = feature_shape[0] * feature_shape[1]
    bound = 1.0 / np.sqrt(n_feat)
    if cfg.hidden_width > 0:
        hw = rng.uniform(-bound, bound, size=(cfg.hidden_width, n_feat))
        hb = np.zeros(cfg.hidden_width)
        w = rng.uniform(-1.0 / np.sqrt(cfg.hidden_width), 1.0 / np.sqrt(cfg.hidden_width),
                        size=(len(labels), cfg.hidden_width))
    else:
        hw = hb = None
        w = rng.uniform(-bound, bound, size=(len(labels), n_feat))
    return DeskModel(w, np.zeros(len(labels)), list(labels), feature_shape, hw, hb)


def train(data: list[tuple[LogMelFeatures, str]], cfg: TrainConfig = TrainConfig()) -> DeskModel:
    """Deterministic mini-batch SGD; same seed gives bit-identical models."""
    if not data:
        raise DegenerateLabels("no training data")
    labels = sorted({lab for _, lab in data})
    if len(labels) < 2:
        raise DegenerateLabels("need at least 2 distinct labels")
    shape = data[0][0].values.shape
    for feat, _ in data:
        if feat.values.shape != shape:
            raise ShapeMismatch(f"mixed feature shapes {feat.values.shape} vs {shape}")

    lab_idx = {lab: i for i, lab in enumerate(labels)}
    X = np.stack([_flatten(f) for f, _ in data])
    y = np.array([lab_idx[lab] for _, lab in data])

    model = init_model(labels, shape, cfg)
    rng = np.random.default_rng([cfg.seed, 0x7124])
    n = len(X)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            sel = order[lo : lo + cfg.batch_size]
            _, grads = loss_and_grad(model, X[sel], y[sel], cfg.l2)
            model.weights -= cfg.learning_rate * grads["weights"]
            model.bias -= cfg.learning_rate * grads["bias"]
            if model.hidden_w is not None:
                model.hidden_w -= cfg.learning_rate * grads["hidden_w"]
                model.hidden_b -= cfg.learning_rate * grads["hidden_b"]
    return model


def save_model(path, model: DeskModel) -> None:
    meta = json.dumps({"labels": model.labels}).encode()
    with open(path, "wb") as f:
        f.write(MODEL_MAGIC)
        width = model.hidden_w.shape[0] if model.hidden_w is not None else 0
        f.write(struct.pack("<IIIII", MODEL_VERSION, model.n_classes,
                            model.feature_shape[0], model.feature_shape[1], width))
        f.write(struct.pack("<I", len(meta)))
        f.write(meta)
        parts = [model.weights, model.bias]
        if model.hidden_w is not None:
            parts += [model.hidden_w, model.hidden_b]
        for arr in parts:
            f.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_model(path) -> DeskModel:
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != MODEL_MAGIC:
        raise UnsupportedFormat(f"{path}: bad magic")
    version, n_classes, n_mels, n_frames, width = struct.unpack_from("<IIIII", data, 4)
    if version != MODEL_VERSION:
        raise UnsupportedFormat(f"{path}: unknown model version {version}")
    (meta_len,) = struct.unpack_from("<I", data, 24)
    meta = json.loads(data[28 : 28 + meta_len])
    pos = 28 + meta_len
    n_feat = n_mels * n_frames

    def take(shape):
        nonlocal pos
        cnt = int(np.prod(shape))
        if len(data) < pos + 4 * cnt:
            raise Truncated(f"{path}: model file too short")
        arr = np.frombuffer(data, dtype="<f4", count=cnt, offset=pos).astype(np.float64)
        pos += 4 * cnt
        return arr.reshape(shape)

    if width > 0:
        w = take((n_classes, width))
        b = take((n_classes,))
        hw = take((width, n_feat))
        hb = take((width,))
    else:
        w = take((n_classes, n_feat))
        b = take((n_classes,))
        hw = hb = None
    return DeskModel(w, b, meta["labels"], (n_mels, n_frames), hw, hb)
