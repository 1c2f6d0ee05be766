"""Differentiable layers on float64 numpy arrays.

Every layer caches what its backward pass needs during ``forward`` and
accumulates parameter gradients into ``grads`` (same order as ``params``).
Dense inputs are ``(N, F)``; convolutional inputs are ``(N, C, L)``.
"""

from __future__ import annotations

import numpy as np


class ShapeError(ValueError):
    pass


class Layer:
    name = "layer"

    def __init__(self):
        self.params: list[np.ndarray] = []
        self.grads: list[np.ndarray] = []
        self.buffers: list[np.ndarray] = []

    def forward(self, x: np.ndarray, train: bool, rng: np.random.Generator | None = None) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_grad(self) -> None:
        for g in self.grads:
            g.fill(0.0)


class Dense(Layer):
    name = "dense"

    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator):
        super().__init__()
        bound = 1.0 / np.sqrt(n_in)
        self.W = rng.uniform(-bound, bound, size=(n_out, n_in))
        self.b = np.zeros(n_out)
        self.params = [self.W, self.b]
        self.grads = [np.zeros_like(self.W), np.zeros_like(self.b)]
        self.n_in, self.n_out = n_in, n_out

    def forward(self, x, train, rng=None):
        if x.ndim != 2 or x.shape[1] != self.n_in:
            raise ShapeError(f"dense({self.n_in}->{self.n_out}): got input of shape {x.shape}")
        self._x = x
        return x @ self.W.T + self.b

    def backward(self, dout):
        self.grads[0] += dout.T @ self._x
        self.grads[1] += dout.sum(axis=0)
        return dout @ self.W


class Conv1D(Layer):
    """Cross-correlation over the last axis with zero padding."""

    name = "conv1d"

    def __init__(self, c_in: int, c_out: int, kernel: int, rng: np.random.Generator, stride: int = 1, padding: int = 1):
        super().__init__()
        if stride != 1:
            raise ValueError("only stride 1 is supported")
        bound = 1.0 / np.sqrt(c_in * kernel)
        self.W = rng.uniform(-bound, bound, size=(c_out, c_in, kernel))
        self.b = np.zeros(c_out)
        self.params = [self.W, self.b]
        self.grads = [np.zeros_like(self.W), np.zeros_like(self.b)]
        self.c_in, self.c_out, self.kernel, self.padding = c_in, c_out, kernel, padding

    def out_length(self, length: int) -> int:
        return length + 2 * self.padding - self.kernel + 1

    def forward(self, x, train, rng=None):
        if x.ndim != 3 or x.shape[1] != self.c_in:
            raise ShapeError(f"conv1d({self.c_in}->{self.c_out}): got input of shape {x.shape}")
        n, c, length = x.shape
        lout = self.out_length(length)
        if lout < 1:
            raise ShapeError(f"conv1d: input length {length} too short for kernel {self.kernel}")
        xp = np.pad(x, ((0, 0), (0, 0), (self.padding, self.padding)))
        cols = np.stack([xp[:, :, k : k + lout] for k in range(self.kernel)], axis=2)
        self._cols = cols.reshape(n, c * self.kernel, lout)
        self._in_shape = x.shape
        w = self.W.reshape(self.c_out, -1)
        return w @ self._cols + self.b[None, :, None]

    def backward(self, dout):
        n, c, length = self._in_shape
        lout = dout.shape[2]
        w = self.W.reshape(self.c_out, -1)
        self.grads[0] += np.einsum("nol,nkl->ok", dout, self._cols).reshape(self.W.shape)
        self.grads[1] += dout.sum(axis=(0, 2))
        dcols = (w.T @ dout).reshape(n, c, self.kernel, lout)
        dxp = np.zeros((n, c, length + 2 * self.padding))
        for k in range(self.kernel):
            dxp[:, :, k : k + lout] += dcols[:, :, k, :]
        return dxp[:, :, self.padding : self.padding + length]


class BatchNorm(Layer):
    """Per-feature (2-D input) or per-channel (3-D input) batch normalization."""

    name = "batchnorm"

    def __init__(self, features: int, eps: float = 1e-5, momentum: float = 0.1):
        super().__init__()
        self.gamma = np.ones(features)
        self.beta = np.zeros(features)
        self.params = [self.gamma, self.beta]
        self.grads = [np.zeros(features), np.zeros(features)]
        self.running_mean = np.zeros(features)
        self.running_var = np.ones(features)
        self.buffers = [self.running_mean, self.running_var]
        self.features, self.eps, self.momentum = features, eps, momentum

    def _axes_and_shape(self, x):
        if x.ndim == 2 and x.shape[1] == self.features:
            return (0,), (1, -1)
        if x.ndim == 3 and x.shape[1] == self.features:
            return (0, 2), (1, -1, 1)
        raise ShapeError(f"batchnorm({self.features}): got input of shape {x.shape}")

    def forward(self, x, train, rng=None):
        axes, shape = self._axes_and_shape(x)
        if train:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            count = x.size // self.features
            unbiased = var * count / (count - 1) if count > 1 else var
            self.running_mean *= 1 - self.momentum
            self.running_mean += self.momentum * mean
            self.running_var *= 1 - self.momentum
            self.running_var += self.momentum * unbiased
        else:
            mean, var = self.running_mean, self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean.reshape(shape)) * inv_std.reshape(shape)
        self._cache = (xhat, inv_std, axes, shape, train)
        return xhat * self.gamma.reshape(shape) + self.beta.reshape(shape)

    def backward(self, dout):
        xhat, inv_std, axes, shape, train = self._cache
        self.grads[0] += (dout * xhat).sum(axis=axes)
        self.grads[1] += dout.sum(axis=axes)
        dxhat = dout * self.gamma.reshape(shape)
        if not train:
            return dxhat * inv_std.reshape(shape)
        m = dout.size // self.features
        sum_dxhat = dxhat.sum(axis=axes).reshape(shape)
        sum_dxhat_xhat = (dxhat * xhat).sum(axis=axes).reshape(shape)
        return inv_std.reshape(shape) / m * (m * dxhat - sum_dxhat - xhat * sum_dxhat_xhat)


class ReLU(Layer):
    name = "relu"

    def forward(self, x, train, rng=None):
        self._mask = x > 0
        # np.maximum lets NaN through so a diverged network is caught by the loss check.
        return np.maximum(x, 0.0)

    def backward(self, dout):
        return dout * self._mask


class Dropout(Layer):
    """Inverted dropout: survivors are scaled by 1/(1-p) in training, identity at eval."""

    name = "dropout"

    def __init__(self, p: float):
        super().__init__()
        if not 0.0 <= p < 1.0:
            raise ValueError("dropout probability must lie in [0, 1)")
        self.p = p
        self.enabled = True

    def forward(self, x, train, rng=None):
        if not train or not self.enabled or self.p == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise ValueError("dropout in training mode needs a random generator")
        self._mask = (rng.random(x.shape) >= self.p) / (1.0 - self.p)
        return x * self._mask

    def backward(self, dout):
        return dout if self._mask is None else dout * self._mask


class Flatten(Layer):
    name = "flatten"

    def forward(self, x, train, rng=None):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        return dout.reshape(self._shape)


class Sigmoid(Layer):
    name = "sigmoid"

    def forward(self, x, train, rng=None):
        out = np.empty_like(x)
        pos = x >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        out[~pos] = ex / (1.0 + ex)
        self._out = out
        return out

    def backward(self, dout):
        return dout * self._out * (1.0 - self._out)
