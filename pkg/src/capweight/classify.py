"""Six-class word-importance classifiers over embedding vectors.

Four model kinds share one trainer/predictor interface: multinomial
logistic regression (full-batch gradient descent), one-vs-rest linear
SVM (per-sample subgradient descent in deterministic order), a random
forest, and a single-hidden-layer perceptron. All training is
deterministic for a fixed config and seed.

Model files use a versioned binary layout: magic ``WMDL``, u32 version,
u8 kind tag, u32 dim, then a kind-specific parameter blob. A JSON
sidecar (``<path>.meta.json``) carries the config, seed, and training
corpus hash.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict, dataclass, fields, replace
from math import ceil, sqrt
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import NUM_CLASSES
from .errors import ModelFormatError
from .forest import DecisionTree, grow_forest

KINDS = ("logreg", "linsvm", "rforest", "mlp")
_KIND_TAGS = {kind: tag for tag, kind in enumerate(KINDS)}

MAGIC = b"WMDL"
VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for every model kind, with deterministic defaults."""

    seed: int = 42
    logreg_step: float = 0.1
    logreg_l2: float = 1e-4
    logreg_max_iter: int = 500
    logreg_grad_tol: float = 1e-6
    svm_l2: float = 1e-4
    svm_epochs: int = 500
    forest_trees: int = 100
    forest_max_features: int | None = None  # None: ceil(sqrt(dim))
    forest_bootstrap: bool = True
    mlp_hidden: int = 100
    mlp_step: float = 0.01
    mlp_epochs: int = 200
    mlp_batch: int = 32


@dataclass(frozen=True)
class TrainingInstance:
    features: np.ndarray
    label: int


class ClassifierModel:
    """Base for trained models: maps a dim-vector to a label and 6 scores."""

    kind = ""

    def __init__(self, dim: int, config: TrainConfig):
        self.dim = int(dim)
        self.classes = NUM_CLASSES
        self.config = config

    def _check(self, features) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a {self.dim}-vector, got shape {x.shape}")
        return x

    def scores(self, features) -> np.ndarray:
        raise NotImplementedError

    def predict(self, features) -> tuple[int, np.ndarray]:
        s = self.scores(features)
        return int(np.argmax(s)) + 1, s


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z, axis=-1, keepdims=True))
    return e / np.sum(e, axis=-1, keepdims=True)


class LogisticRegressionModel(ClassifierModel):
    kind = "logreg"

    def __init__(
        self,
        weights: np.ndarray,
        config: TrainConfig,
        loss_history: tuple[float, ...] = (),
    ):
        weights = np.asarray(weights, dtype=np.float64)
        super().__init__(weights.shape[1] - 1, config)
        self.weights = weights  # (6, dim + 1), last column is the bias
        self.loss_history = loss_history  # per-iteration training loss; empty when loaded

    def scores(self, features) -> np.ndarray:
        x = self._check(features)
        return _softmax(self.weights[:, :-1] @ x + self.weights[:, -1])


class LinearSVMModel(ClassifierModel):
    kind = "linsvm"

    def __init__(self, weights: np.ndarray, config: TrainConfig):
        weights = np.asarray(weights, dtype=np.float64)
        super().__init__(weights.shape[1] - 1, config)
        self.weights = weights

    def scores(self, features) -> np.ndarray:
        x = self._check(features)
        margins = self.weights[:, :-1] @ x + self.weights[:, -1]
        return margins - margins.min()  # shift to nonnegative, argmax unchanged


class RandomForestModel(ClassifierModel):
    kind = "rforest"

    def __init__(self, trees: list[DecisionTree], dim: int, config: TrainConfig):
        super().__init__(dim, config)
        self.trees = trees

    def scores(self, features) -> np.ndarray:
        x = self._check(features)
        total = np.zeros(NUM_CLASSES)
        for tree in self.trees:
            total += tree.predict_probs(x)
        return total / len(self.trees)


class MLPModel(ClassifierModel):
    kind = "mlp"

    def __init__(self, w1, b1, w2, b2, config: TrainConfig):
        w1 = np.asarray(w1, dtype=np.float64)
        super().__init__(w1.shape[0], config)
        self.w1 = w1
        self.b1 = np.asarray(b1, dtype=np.float64)
        self.w2 = np.asarray(w2, dtype=np.float64)
        self.b2 = np.asarray(b2, dtype=np.float64)

    def scores(self, features) -> np.ndarray:
        x = self._check(features)
        hidden = np.tanh(x @ self.w1 + self.b1)
        return _softmax(hidden @ self.w2 + self.b2)


def _prepare(instances: Sequence[TrainingInstance]) -> tuple[np.ndarray, np.ndarray]:
    if not instances:
        raise ValueError("no training instances")
    X = np.vstack([np.asarray(inst.features, dtype=np.float64) for inst in instances])
    if not np.all(np.isfinite(X)):
        raise ValueError("training features must be finite")
    y = np.array([inst.label for inst in instances], dtype=np.int64)
    if y.min() < 1 or y.max() > NUM_CLASSES:
        raise ValueError(f"labels must lie in 1..{NUM_CLASSES}")
    return X, y


def _one_hot(y: np.ndarray) -> np.ndarray:
    Y = np.zeros((len(y), NUM_CLASSES))
    Y[np.arange(len(y)), y - 1] = 1.0
    return Y


def _cross_entropy_loss_grad(
    weights: np.ndarray, Xa: np.ndarray, Y: np.ndarray, l2: float
) -> tuple[float, np.ndarray]:
    """Mean L2-regularized softmax cross-entropy and its exact gradient.

    The bias column (last) is excluded from the penalty.
    """
    n = Xa.shape[0]
    logits = Xa @ weights.T
    shift = logits - np.max(logits, axis=1, keepdims=True)
    log_probs = shift - np.log(np.sum(np.exp(shift), axis=1, keepdims=True))
    data_loss = -float(np.sum(Y * log_probs)) / n
    reg_loss = 0.5 * l2 * float(np.sum(weights[:, :-1] ** 2))
    probs = np.exp(log_probs)
    grad = (probs - Y).T @ Xa / n
    grad[:, :-1] += l2 * weights[:, :-1]
    return data_loss + reg_loss, grad


def loss_and_gradient(
    model: LogisticRegressionModel, batch: Sequence[TrainingInstance]
) -> tuple[float, np.ndarray]:
    """Training objective and gradient of a logistic model on a batch."""
    if not isinstance(model, LogisticRegressionModel):
        raise ValueError("loss_and_gradient applies to logistic regression models")
    X, y = _prepare(batch)
    if X.shape[1] != model.dim:
        raise ValueError(f"expected {model.dim}-vectors, got {X.shape[1]}")
    return _cross_entropy_loss_grad(model.weights, _augment(X), _one_hot(y), model.config.logreg_l2)


def _train_logreg(X: np.ndarray, y: np.ndarray, config: TrainConfig) -> LogisticRegressionModel:
    Xa = _augment(X)
    Y = _one_hot(y)
    weights = np.zeros((NUM_CLASSES, Xa.shape[1]))
    losses = []
    for _ in range(config.logreg_max_iter):
        loss, grad = _cross_entropy_loss_grad(weights, Xa, Y, config.logreg_l2)
        losses.append(loss)
        if np.linalg.norm(grad) < config.logreg_grad_tol:
            break
        weights = weights - config.logreg_step * grad
    return LogisticRegressionModel(weights, config, tuple(losses))


def _train_linsvm(X: np.ndarray, y: np.ndarray, config: TrainConfig) -> LinearSVMModel:
    # One-vs-rest hinge loss, per-sample subgradient steps of 1/(lambda*t)
    # over the samples in their given order.
    Xa = _augment(X)
    signs = np.where(_one_hot(y) > 0, 1.0, -1.0)
    weights = np.zeros((NUM_CLASSES, Xa.shape[1]))
    lam = config.svm_l2
    t = 0
    for _ in range(config.svm_epochs):
        for i in range(Xa.shape[0]):
            t += 1
            x = Xa[i]
            violating = signs[i] * (weights @ x) < 1.0
            weights *= 1.0 - 1.0 / t
            if violating.any():
                eta = 1.0 / (lam * t)
                weights[violating] += np.outer(eta * signs[i, violating], x)
    return LinearSVMModel(weights, config)


def _train_forest(X: np.ndarray, y: np.ndarray, config: TrainConfig) -> RandomForestModel:
    dim = X.shape[1]
    max_features = config.forest_max_features or ceil(sqrt(dim))
    trees = grow_forest(
        X,
        y,
        n_trees=config.forest_trees,
        max_features=max_features,
        seed=config.seed,
        bootstrap=config.forest_bootstrap,
    )
    return RandomForestModel(trees, dim, config)


def _train_mlp(X: np.ndarray, y: np.ndarray, config: TrainConfig) -> MLPModel:
    rng = np.random.default_rng(config.seed)
    n, dim = X.shape
    hidden = config.mlp_hidden
    limit1 = sqrt(6.0 / (dim + hidden))
    limit2 = sqrt(6.0 / (hidden + NUM_CLASSES))
    w1 = rng.uniform(-limit1, limit1, size=(dim, hidden))
    b1 = np.zeros(hidden)
    w2 = rng.uniform(-limit2, limit2, size=(hidden, NUM_CLASSES))
    b2 = np.zeros(NUM_CLASSES)
    Y = _one_hot(y)
    for _ in range(config.mlp_epochs):
        perm = rng.permutation(n)
        for start in range(0, n, config.mlp_batch):
            sel = perm[start : start + config.mlp_batch]
            Xb, Yb = X[sel], Y[sel]
            h = np.tanh(Xb @ w1 + b1)
            probs = _softmax(h @ w2 + b2)
            delta_out = (probs - Yb) / len(sel)
            grad_w2 = h.T @ delta_out
            grad_b2 = delta_out.sum(axis=0)
            delta_h = (delta_out @ w2.T) * (1.0 - h**2)
            grad_w1 = Xb.T @ delta_h
            grad_b1 = delta_h.sum(axis=0)
            w1 -= config.mlp_step * grad_w1
            b1 -= config.mlp_step * grad_b1
            w2 -= config.mlp_step * grad_w2
            b2 -= config.mlp_step * grad_b2
    return MLPModel(w1, b1, w2, b2, config)


def train(
    instances: Sequence[TrainingInstance],
    kind: str,
    config: TrainConfig = TrainConfig(),
) -> ClassifierModel:
    """Fit a model of the given kind; deterministic for a fixed config."""
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}, expected one of {KINDS}")
    X, y = _prepare(instances)
    if kind in ("logreg", "linsvm"):
        missing = sorted(set(range(1, NUM_CLASSES + 1)) - set(int(v) for v in y))
        if missing:
            raise ValueError(f"{kind} requires every class; missing {missing}")
    trainer = {
        "logreg": _train_logreg,
        "linsvm": _train_linsvm,
        "rforest": _train_forest,
        "mlp": _train_mlp,
    }[kind]
    return trainer(X, y, config)


def predict(model: ClassifierModel, features) -> tuple[int, np.ndarray]:
    """Label in 1..6 plus the 6-vector of nonnegative class scores."""
    return model.predict(features)


# -- serialization ------------------------------------------------------


def _pack_matrix(m: np.ndarray) -> bytes:
    rows, cols = m.shape
    return struct.pack("<II", rows, cols) + m.astype("<f8", copy=False).tobytes()


class _Reader:
    def __init__(self, data: bytes, offset: int = 0):
        self.data = data
        self.offset = offset

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.data):
            raise ModelFormatError(f"truncated model file while reading {what}")
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def matrix(self, what: str) -> np.ndarray:
        rows, cols = self.unpack("<II", what)
        flat = np.frombuffer(self.take(8 * rows * cols, what), dtype="<f8")
        return flat.reshape(rows, cols).copy()


def save_model(path: str | Path, model: ClassifierModel, corpus_hash: str | None = None) -> None:
    """Write the model binary plus its JSON metadata sidecar."""
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<IBI", VERSION, _KIND_TAGS[model.kind], model.dim)
    if isinstance(model, (LogisticRegressionModel, LinearSVMModel)):
        blob += _pack_matrix(model.weights)
    elif isinstance(model, MLPModel):
        blob += _pack_matrix(model.w1)
        blob += _pack_matrix(model.b1.reshape(1, -1))
        blob += _pack_matrix(model.w2)
        blob += _pack_matrix(model.b2.reshape(1, -1))
    elif isinstance(model, RandomForestModel):
        blob += struct.pack("<I", len(model.trees))
        for tree in model.trees:
            blob += struct.pack("<I", tree.n_nodes)
            blob += tree.feature.astype("<i4").tobytes()
            blob += tree.threshold.astype("<f8").tobytes()
            blob += tree.left.astype("<i4").tobytes()
            blob += tree.right.astype("<i4").tobytes()
            blob += tree.probs.astype("<f8").tobytes()
    else:
        raise ValueError(f"cannot serialize model kind {model.kind!r}")
    Path(path).write_bytes(bytes(blob))

    meta = {
        "kind": model.kind,
        "dim": model.dim,
        "classes": model.classes,
        "config": asdict(model.config),
        "seed": model.config.seed,
        "corpus_hash": corpus_hash,
    }
    Path(str(path) + ".meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n"
    )


def _config_from_meta(path: Path) -> TrainConfig:
    meta_path = Path(str(path) + ".meta.json")
    if not meta_path.exists():
        return TrainConfig()
    meta = json.loads(meta_path.read_text())
    known = {f.name for f in fields(TrainConfig)}
    values = {k: v for k, v in meta.get("config", {}).items() if k in known}
    return replace(TrainConfig(), **values)


def load_model(path: str | Path) -> ClassifierModel:
    """Read a model binary written by save_model."""
    reader = _Reader(Path(path).read_bytes())
    if reader.take(4, "magic") != MAGIC:
        raise ModelFormatError("bad magic, not a model file")
    version, tag, dim = reader.unpack("<IBI", "header")
    if version != VERSION:
        raise ModelFormatError(f"unsupported model version {version}")
    kinds_by_tag = {tag: kind for kind, tag in _KIND_TAGS.items()}
    if tag not in kinds_by_tag:
        raise ModelFormatError(f"unknown model kind tag {tag}")
    kind = kinds_by_tag[tag]
    config = _config_from_meta(Path(path))

    if kind in ("logreg", "linsvm"):
        weights = reader.matrix("weights")
        cls = LogisticRegressionModel if kind == "logreg" else LinearSVMModel
        model: ClassifierModel = cls(weights, config)
    elif kind == "mlp":
        w1 = reader.matrix("w1")
        b1 = reader.matrix("b1").ravel()
        w2 = reader.matrix("w2")
        b2 = reader.matrix("b2").ravel()
        model = MLPModel(w1, b1, w2, b2, config)
    else:
        (n_trees,) = reader.unpack("<I", "tree count")
        trees = []
        for _ in range(n_trees):
            (n_nodes,) = reader.unpack("<I", "node count")
            feature = np.frombuffer(reader.take(4 * n_nodes, "features"), dtype="<i4")
            threshold = np.frombuffer(reader.take(8 * n_nodes, "thresholds"), dtype="<f8")
            left = np.frombuffer(reader.take(4 * n_nodes, "left children"), dtype="<i4")
            right = np.frombuffer(reader.take(4 * n_nodes, "right children"), dtype="<i4")
            probs = np.frombuffer(
                reader.take(8 * n_nodes * NUM_CLASSES, "leaf distributions"), dtype="<f8"
            ).reshape(n_nodes, NUM_CLASSES)
            trees.append(DecisionTree(feature, threshold, left, right, probs))
        model = RandomForestModel(trees, dim, config)
    if reader.offset != len(reader.data):
        raise ModelFormatError("trailing bytes after model payload")
    if model.dim != dim:
        raise ModelFormatError(f"header dim {dim} does not match payload dim {model.dim}")
    return model


def file_sha256(path: str | Path) -> str:
    """Hex digest of a file's bytes; used to stamp models with their corpus."""
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()
