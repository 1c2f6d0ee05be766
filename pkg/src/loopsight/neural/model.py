"""Declarative architectures and the sequential network that runs them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from loopsight.neural.layers import BatchNorm, Conv1D, Dense, Dropout, Flatten, Layer, ReLU, Sigmoid

DNN = "dnn"
CNN = "cnn"


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    input_width: int
    layers: tuple[tuple, ...] = field(default=())

    @classmethod
    def dnn(cls, width: int, hidden=(128, 64, 32), dropout: float = 0.5) -> "ModelSpec":
        layers: list[tuple] = []
        n_in = width
        for units in hidden:
            layers += [("dense", n_in, units), ("batchnorm", units), ("relu",), ("dropout", dropout)]
            n_in = units
        layers += [("dense", n_in, 1), ("sigmoid",)]
        return cls(DNN, width, tuple(layers))

    @classmethod
    def cnn(cls, width: int, channels=(2, 4), kernel: int = 3, dropout: float = 0.6, hidden: int = 4) -> "ModelSpec":
        layers: list[tuple] = []
        c_in = 1
        for c_out in channels:
            layers += [("conv1d", c_in, c_out, kernel, 1, 1), ("batchnorm", c_out), ("relu",), ("dropout", dropout)]
            c_in = c_out
        # Stride 1 with padding 1 and kernel 3 keeps the length at `width`.
        length = width + 2 - kernel + 1
        layers += [("flatten",), ("dense", c_in * length, hidden), ("relu",), ("dense", hidden, 1), ("sigmoid",)]
        return cls(CNN, width, tuple(layers))

    @classmethod
    def for_kind(cls, kind: str, width: int) -> "ModelSpec":
        kind = kind.lower()
        if kind == DNN:
            return cls.dnn(width)
        if kind == CNN:
            return cls.cnn(width)
        raise ValueError(f"unknown model kind {kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "input_width": self.input_width, "layers": [list(l) for l in self.layers]}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(d["kind"], int(d["input_width"]), tuple(tuple(l) for l in d["layers"]))


def _make_layer(desc: tuple, rng: np.random.Generator) -> Layer:
    kind, *args = desc
    if kind == "dense":
        return Dense(int(args[0]), int(args[1]), rng)
    if kind == "conv1d":
        c_in, c_out, kernel, stride, padding = (int(a) for a in args)
        return Conv1D(c_in, c_out, kernel, rng, stride=stride, padding=padding)
    if kind == "batchnorm":
        return BatchNorm(int(args[0]))
    if kind == "relu":
        return ReLU()
    if kind == "dropout":
        return Dropout(float(args[0]))
    if kind == "flatten":
        return Flatten()
    if kind == "sigmoid":
        return Sigmoid()
    raise ValueError(f"unknown layer kind {kind!r}")


class Network:
    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        self.spec = spec
        self.layers = [_make_layer(d, rng) for d in spec.layers]

    @property
    def params(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params]

    @property
    def grads(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads]

    @property
    def buffers(self) -> list[np.ndarray]:
        return [b for layer in self.layers for b in layer.buffers]

    def _shape_input(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.spec.input_width:
            raise ValueError(f"expected input of width {self.spec.input_width}, got shape {X.shape}")
        return X[:, None, :] if self.spec.kind == CNN else X

    def forward(self, X: np.ndarray, train: bool = False, rng: np.random.Generator | None = None) -> np.ndarray:
        """Probabilities of class 1, shape ``(N,)``."""
        out = self._shape_input(X)
        for layer in self.layers:
            out = layer.forward(out, train, rng)
        return out[:, 0]

    def backward(self, dprob: np.ndarray) -> None:
        grad = dprob.reshape(-1, 1)
        for layer in reversed(self.layers):
            grad = layer.backward(grad)

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def set_dropout(self, enabled: bool) -> None:
        for layer in self.layers:
            if isinstance(layer, Dropout):
                layer.enabled = enabled


def save_network(net: Network, path, extra: dict | None = None) -> None:
    """Spec descriptor plus flat parameter and buffer arrays in declaration order."""
    doc = {
        "spec": net.spec.to_dict(),
        "parameters": [[repr(float(v)) for v in p.ravel()] for p in net.params],
        "buffers": [[repr(float(v)) for v in b.ravel()] for b in net.buffers],
    }
    if extra:
        doc["extra"] = extra
    Path(path).write_text(json.dumps(doc, indent=0, sort_keys=True) + "\n")


def load_network(path) -> tuple[Network, dict]:
    doc = json.loads(Path(path).read_text())
    spec = ModelSpec.from_dict(doc["spec"])
    net = Network(spec, np.random.default_rng(0))
    for target, values in zip(net.params + net.buffers, doc["parameters"] + doc["buffers"]):
        flat = np.array([float(v) for v in values])
        if flat.size != target.size:
            raise ValueError("stored parameter size does not match the model layout")
        target[...] = flat.reshape(target.shape)
    return net, doc.get("extra", {})
