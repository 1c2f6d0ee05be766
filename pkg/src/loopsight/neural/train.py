"""Loss, optimizer, training loop, prediction and finite-difference gradient checks."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from loopsight.neural.model import Network, ModelSpec

PROB_CLAMP = 1e-7


class TrainingDivergence(RuntimeError):
    pass


def bce_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient with respect to ``pred``.

    Predictions are clamped to ``[1e-7, 1 - 1e-7]``; the gradient is evaluated at
    the clamped value so saturated outputs still receive a training signal.
    """
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    p = np.clip(pred, PROB_CLAMP, 1.0 - PROB_CLAMP)
    n = p.size
    loss = -np.mean(target * np.log(p) + (1.0 - target) * np.log1p(-p))
    grad = (p - target) / (p * (1.0 - p)) / n
    return float(loss), grad


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1000
    batch_size: int = 4
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_update(params, grads, state: AdamState, t: int, cfg: TrainConfig) -> None:
    """One in-place Adam step with bias correction, at step number ``t`` (>= 1)."""
    if t < 1:
        raise ValueError("Adam step counter starts at 1")
    b1, b2 = cfg.beta1, cfg.beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.eps)
    state.t = t


@dataclass
class TrainingHistory:
    train_loss: list[float] = field(default_factory=list)
    train_acc: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_acc: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.train_loss)

    def rows(self):
        for e in range(len(self)):
            yield e + 1, self.train_loss[e], self.train_acc[e], self.val_loss[e], self.val_acc[e]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["epoch", "train_loss", "train_acc", "val_loss", "val_acc"])
            for row in self.rows():
                writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])

    @classmethod
    def read_csv(cls, path) -> "TrainingHistory":
        hist = cls()
        with open(path, newline="") as fh:
            for r in csv.DictReader(fh):
                hist.train_loss.append(float(r["train_loss"]))
                hist.train_acc.append(float(r["train_acc"]))
                hist.val_loss.append(float(r["val_loss"]))
                hist.val_acc.append(float(r["val_acc"]))
        return hist


@dataclass
class TrainedModel:
    network: Network
    config: TrainConfig
    preprocess: dict = field(default_factory=dict)

    @property
    def spec(self) -> ModelSpec:
        return self.network.spec


def evaluate(net: Network, X: np.ndarray, y: np.ndarray, threshold: float = 0.5) -> tuple[float, float]:
    """Eval-mode (loss, accuracy) over the full set."""
    prob = net.forward(X, train=False)
    loss, _ = bce_loss(prob, y)
    acc = float(np.mean((prob >= threshold).astype(int) == y))
    return loss, acc


def train_model(spec: ModelSpec, split, cfg: TrainConfig) -> tuple[TrainedModel, TrainingHistory]:
    """Mini-batch Adam on BCE; full-pass eval-mode metrics on train and val after each epoch.

    ``split`` needs ``X_train, y_train, X_val, y_val`` already at ``spec.input_width``.
    Initialization, shuffling and dropout draw from independent streams of ``cfg.seed``.
    """
    init_ss, shuffle_ss, dropout_ss = np.random.SeedSequence(cfg.seed).spawn(3)
    net = Network(spec, np.random.default_rng(init_ss))
    shuffle_rng = np.random.default_rng(shuffle_ss)
    dropout_rng = np.random.default_rng(dropout_ss)
    X, y = np.asarray(split.X_train, dtype=float), np.asarray(split.y_train, dtype=float)
    if X.shape[1] != spec.input_width:
        raise ValueError(f"training data width {X.shape[1]} does not match the model input width {spec.input_width}")
    params, grads = net.params, net.grads
    state = AdamState.zeros_like(params)
    history = TrainingHistory()
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(len(X))
        for start in range(0, len(X), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            prob = net.forward(X[idx], train=True, rng=dropout_rng)
            loss, dprob = bce_loss(prob, y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergence(f"divergence at epoch {epoch}")
            net.zero_grad()
            net.backward(dprob)
            step += 1
            adam_update(params, grads, state, step, cfg)
        tr_loss, tr_acc = evaluate(net, X, y)
        va_loss, va_acc = evaluate(net, split.X_val, split.y_val)
        if not (np.isfinite(tr_loss) and np.isfinite(va_loss)):
            raise TrainingDivergence(f"divergence at epoch {epoch}")
        history.train_loss.append(tr_loss)
        history.train_acc.append(tr_acc)
        history.val_loss.append(va_loss)
        history.val_acc.append(va_acc)
    return TrainedModel(net, cfg), history


def predict(model, X: np.ndarray, threshold: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Eval-mode probabilities and labels; a probability equal to ``threshold`` maps to class 1."""
    net = model.network if isinstance(model, TrainedModel) else model
    prob = net.forward(X, train=False)
    return prob, (prob >= threshold).astype(np.int64)


def _bce_objective(prob, y):
    return bce_loss(prob, y)


def gradient_check(spec_or_net, X: np.ndarray, y: np.ndarray, eps: float = 1e-5, seed: int = 0, loss=None) -> float:
    """Largest relative disagreement between backprop and central differences.

    Dropout is disabled and batch norm runs in training mode on the fixed
    batch. Per parameter tensor the error is ``max|analytic - numeric|``
    divided by ``max(max|analytic|, max|numeric|, 1e-6)``; the floor keeps
    analytically zero gradients (bias feeding a batch norm) from dividing
    rounding noise by zero.
    """
    loss = loss or _bce_objective
    net = spec_or_net if isinstance(spec_or_net, Network) else Network(spec_or_net, np.random.default_rng(seed))
    net.set_dropout(False)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    try:
        net.zero_grad()
        prob = net.forward(X, train=True)
        _, dprob = loss(prob, y)
        net.backward(dprob)
        analytic = [g.copy() for g in net.grads]
        worst = 0.0
        for p, a in zip(net.params, analytic):
            numeric = np.zeros_like(p)
            flat = p.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                f_plus, _ = loss(net.forward(X, train=True), y)
                flat[i] = orig - eps
                f_minus, _ = loss(net.forward(X, train=True), y)
                flat[i] = orig
                numeric.reshape(-1)[i] = (f_plus - f_minus) / (2 * eps)
            scale = max(np.abs(a).max(initial=0.0), np.abs(numeric).max(initial=0.0), 1e-6)
            worst = max(worst, float(np.abs(a - numeric).max(initial=0.0) / scale))
        return worst
    finally:
        net.set_dropout(True)
