"""Single-hidden-layer ReLU network and L1 logistic regression in numpy.

Both models score ``x`` with a real ``f(x)`` and classify ``f(x) >= 0`` as 1,
so a trained model is directly a :class:`~banzhaf.game.Game`.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from banzhaf.dataio import Dataset, train_test_split
from banzhaf.errors import ArgumentError, TrainingError
from banzhaf.game import Game, LinearThresholdGame, MlpGame

MODEL_KINDS = ("mlp", "logreg")


@dataclass(frozen=True)
class TrainConfig:
    model_kind: str = "mlp"
    hidden: int = 20
    epochs: int = 200
    learning_rate: float = 0.05
    l1_lambda: float = 0.0
    batch_size: int = 16
    seed: int = 0
    split: tuple[int, int] = (187, 80)
    split_seed: int = 0

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ArgumentError(f"model_kind must be one of {MODEL_KINDS}, got {self.model_kind!r}")
        if self.hidden < 1 or self.epochs < 1 or self.batch_size < 1:
            raise ArgumentError("hidden, epochs and batch_size must be positive")
        if self.learning_rate <= 0 or self.l1_lambda < 0:
            raise ArgumentError("learning_rate must be positive and l1_lambda non-negative")
        object.__setattr__(self, "split", tuple(int(v) for v in self.split))

    @classmethod
    def from_dict(cls, doc: dict) -> TrainConfig:
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ArgumentError(f"unknown training config keys: {', '.join(sorted(unknown))}")
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> TrainConfig:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["split"] = list(self.split)
        return doc


def default_config(kind: str) -> TrainConfig:
    """The committed default hyperparameters for ``kind`` (``mlp`` or ``logreg``)."""
    if kind not in MODEL_KINDS:
        raise ArgumentError(f"unknown model kind {kind!r}")
    text = resources.files("banzhaf").joinpath(f"resources/{kind}.json").read_text()
    return TrainConfig.from_dict(json.loads(text))


@dataclass(frozen=True)
class SaliencyResult:
    scores: tuple[float, ...]
    normalization: str
    dataset_rows: int


@dataclass
class TrainResult:
    model: Game
    train_accuracy: float
    test_accuracy: float
    config: TrainConfig
    loss_history: list[float] = field(default_factory=list)
    pruned_by_l1: list[int] = field(default_factory=list)
    runtime_ms: float = 0.0

    @property
    def metrics(self) -> dict:
        return {"train_accuracy": self.train_accuracy, "test_accuracy": self.test_accuracy}


def _as_matrix(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    x = np.atleast_2d(x)
    if x.shape[1] != n:
        raise ArgumentError(f"input has {x.shape[1]} features, model expects {n}")
    return x


def mlp_forward(model: MlpGame, x) -> tuple[float, np.ndarray]:
    """Score of one input vector and the hidden pre-activations."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ArgumentError(f"input has shape {x.shape}, model expects ({model.n_features},)")
    pre = model.w1 @ x + model.b1
    return float(np.maximum(pre, 0.0) @ model.w2 + model.b2), pre


def input_gradients(model: Game, X) -> np.ndarray:
    """Row-wise gradients of the score with respect to the inputs.

    The ReLU derivative at exactly 0 is taken as 0.
    """
    X = _as_matrix(X, model.n_features)
    if isinstance(model, LinearThresholdGame):
        return np.broadcast_to(model.float_weights, X.shape).copy()
    if not isinstance(model, MlpGame):
        raise ArgumentError(f"gradients need an MLP or linear model, not {model.kind}")
    active = (X @ model.w1.T + model.b1) > 0.0
    return (active * model.w2) @ model.w1


def input_gradient(model: Game, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ArgumentError("input_gradient takes a single vector")
    return input_gradients(model, x[None, :])[0]


def gradient_saliency(model: Game, data: Dataset, normalization: str = "mean") -> SaliencyResult:
    """Sum (or mean) over rows of ``|d f / d x_i|``."""
    if normalization not in ("mean", "sum"):
        raise ArgumentError(f"normalization must be mean or sum, got {normalization!r}")
    X = data.X if isinstance(data, Dataset) else np.asarray(data)
    if len(X) == 0:
        raise ArgumentError("saliency needs a non-empty dataset")
    if isinstance(model, LinearThresholdGame):
        # Constant gradient: skip the row sum so the mean is |w| to the last bit.
        _as_matrix(X, model.n_features)
        scale = 1.0 if normalization == "mean" else float(len(X))
        return SaliencyResult(tuple(float(v) for v in np.abs(model.float_weights) * scale), normalization, len(X))
    total = np.abs(input_gradients(model, X)).sum(axis=0)
    if normalization == "mean":
        total = total / len(X)
    return SaliencyResult(tuple(float(v) for v in total), normalization, len(X))


# Training ----------------------------------------------------------------


def soft_threshold(w: np.ndarray, t: float) -> np.ndarray:
    return np.sign(w) * np.maximum(np.abs(w) - t, 0.0)


def _sigmoid(s: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * s))


def _bce(scores: np.ndarray, y: np.ndarray) -> float:
    # mean of log(1 + e^s) - y s
    return float(np.mean(np.logaddexp(0.0, scores) - y * scores))


def accuracy(model: Game, data: Dataset) -> float:
    if len(data) == 0:
        return float("nan")
    predicted = model.evaluate_batch(data.masks)
    return float(np.mean(predicted == data.y))


def _batches(rng: np.random.Generator, rows: int, size: int):
    order = rng.permutation(rows)
    for start in range(0, rows, size):
        yield order[start : start + size]


def _train_mlp(X: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> tuple[MlpGame, list[float]]:
    rng = np.random.default_rng(cfg.seed)
    n = X.shape[1]
    w1 = rng.normal(0.0, np.sqrt(2.0 / n), size=(cfg.hidden, n))
    b1 = np.zeros(cfg.hidden)
    w2 = rng.normal(0.0, np.sqrt(1.0 / cfg.hidden), size=cfg.hidden)
    b2 = 0.0
    history = []
    lr = cfg.learning_rate
    for _ in range(cfg.epochs):
        for idx in _batches(rng, len(X), cfg.batch_size):
            xb, yb = X[idx], y[idx]
            pre = xb @ w1.T + b1
            hid = np.maximum(pre, 0.0)
            s = hid @ w2 + b2
            ds = (_sigmoid(s) - yb) / len(idx)
            g_w2 = hid.T @ ds
            g_b2 = ds.sum()
            dpre = np.outer(ds, w2) * (pre > 0.0)
            g_w1 = dpre.T @ xb
            g_b1 = dpre.sum(axis=0)
            w1 -= lr * g_w1
            b1 -= lr * g_b1
            w2 -= lr * g_w2
            b2 -= lr * g_b2
        history.append(_bce(np.maximum(X @ w1.T + b1, 0.0) @ w2 + b2, y))
    return MlpGame(w1, b1, w2, b2), history


def proximal_step(w: np.ndarray, grad: np.ndarray, lr: float, l1_lambda: float) -> np.ndarray:
    """Gradient step on the smooth loss followed by the L1 proximal operator."""
    return soft_threshold(w - lr * grad, lr * l1_lambda)


def _train_logreg(X: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> tuple[LinearThresholdGame, list[float]]:
    rng = np.random.default_rng(cfg.seed)
    w = np.zeros(X.shape[1])
    b = 0.0
    history = []
    lr = cfg.learning_rate
    for _ in range(cfg.epochs):
        for idx in _batches(rng, len(X), cfg.batch_size):
            xb, yb = X[idx], y[idx]
            ds = (_sigmoid(xb @ w + b) - yb) / len(idx)
            w = proximal_step(w, xb.T @ ds, lr, cfg.l1_lambda)
            b -= lr * ds.sum()
        history.append(_bce(X @ w + b, y) + cfg.l1_lambda * float(np.abs(w).sum()))
    # +0.0 folds -0.0 into 0.0 so pruned weights serialize as "0.0".
    return LinearThresholdGame(list(w + 0.0), b + 0.0, label="logreg"), history


def train(data: Dataset, config: TrainConfig, test: Dataset | None = None) -> TrainResult:
    """Fit ``config.model_kind`` on ``data``.

    Without ``test``, ``data`` is shuffled with ``config.split_seed`` and cut
    into ``config.split``. With ``test``, ``data`` is used whole for training.
    """
    t0 = time.perf_counter()
    if test is None:
        train_set, test_set = train_test_split(data, *config.split, seed=config.split_seed)
    else:
        train_set, test_set = data, test
        if test.n != data.n:
            raise ArgumentError("train and test sets have different feature counts")
    if len(train_set) == 0 or len(np.unique(train_set.y)) < 2:
        raise TrainingError("training split contains a single class; cannot fit a classifier")
    X = train_set.X.astype(np.float64)
    y = train_set.y.astype(np.float64)
    if config.model_kind == "mlp":
        model, history = _train_mlp(X, y, config)
        pruned = []
    else:
        model, history = _train_logreg(X, y, config)
        pruned = [j for j, w in enumerate(model.weights) if w == 0]
    return TrainResult(
        model=model,
        train_accuracy=accuracy(model, train_set),
        test_accuracy=accuracy(model, test_set),
        config=config,
        loss_history=history,
        pruned_by_l1=pruned,
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
    )


def with_overrides(config: TrainConfig, **changes) -> TrainConfig:
    return replace(config, **{k: v for k, v in changes.items() if v is not None})
