import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopsight.neural import (
    AdamState,
    BatchNorm,
    Conv1D,
    Dense,
    Dropout,
    ModelSpec,
    Network,
    ShapeError,
    TrainConfig,
    TrainingDivergence,
    adam_update,
    bce_loss,
    gradient_check,
    load_network,
    predict,
    save_network,
    train_model,
)

RNG = np.random.default_rng


class TestLayers:
    def test_identity_kernel(self):
        conv = Conv1D(1, 1, 3, RNG(0))
        conv.W[...] = [[[0.0, 1.0, 0.0]]]
        x = np.array([[[1.5, -2.0, 3.0]]])
        assert np.array_equal(conv.forward(x, train=False), x)

    def test_batchnorm_two_point(self):
        bn = BatchNorm(1)
        out = bn.forward(np.array([[-1.0], [1.0]]), train=True)
        assert np.allclose(out.ravel(), np.array([-1, 1]) / np.sqrt(1 + 1e-5))

    def test_batchnorm_eval_uses_running_stats(self):
        bn = BatchNorm(2)
        x = RNG(1).standard_normal((8, 2)) * 3 + 5
        for _ in range(200):
            bn.forward(x, train=True)
        assert np.all(bn.running_var >= 0)
        # The running estimates converge to the batch moments (unbiased variance).
        assert np.allclose(bn.running_mean, x.mean(axis=0))
        assert np.allclose(bn.running_var, x.var(axis=0, ddof=1))
        fresh = np.array([[0.0, 0.0]])
        expected = (fresh - bn.running_mean) / np.sqrt(bn.running_var + 1e-5)
        assert np.allclose(bn.forward(fresh, train=False), expected)

    def test_dropout_eval_identity(self):
        x = RNG(2).standard_normal((5, 7))
        assert np.array_equal(Dropout(0.5).forward(x, train=False), x)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.05, 0.9), st.integers(0, 2**31))
    def test_dropout_train_scaling(self, p, seed):
        x = np.ones((200, 50))
        out = Dropout(p).forward(x, train=True, rng=RNG(seed))
        kept = out != 0
        assert np.allclose(out[kept], 1 / (1 - p))
        assert abs(kept.mean() - (1 - p)) < 0.03

    def test_dense_identity(self):
        d = Dense(3, 3, RNG(0))
        d.W[...] = np.eye(3)
        x = RNG(3).standard_normal((4, 3))
        assert np.array_equal(d.forward(x, train=False), x)

    def test_shape_errors_name_layer(self):
        with pytest.raises(ShapeError, match="dense"):
            Dense(3, 2, RNG(0)).forward(np.zeros((2, 4)), train=False)
        with pytest.raises(ShapeError, match="conv1d"):
            Conv1D(2, 2, 3, RNG(0)).forward(np.zeros((2, 1, 5)), train=False)
        with pytest.raises(ShapeError, match="batchnorm"):
            BatchNorm(3).forward(np.zeros((2, 4)), train=True)


class TestAgainstTorch:
    """Forward and input gradients of conv and batch norm, checked against PyTorch."""

    def test_conv1d(self):
        torch = pytest.importorskip("torch")
        conv = Conv1D(2, 3, 3, RNG(4))
        conv.b[...] = RNG(5).standard_normal(3)
        x = RNG(6).standard_normal((4, 2, 9))
        dout = RNG(7).standard_normal((4, 3, 9))
        out = conv.forward(x, train=True)
        dx = conv.backward(dout)
        tx = torch.tensor(x, requires_grad=True)
        ty = torch.nn.functional.conv1d(tx, torch.tensor(conv.W), torch.tensor(conv.b), padding=1)
        ty.backward(torch.tensor(dout))
        assert np.allclose(out, ty.detach().numpy())
        assert np.allclose(dx, tx.grad.numpy())

    def test_batchnorm_channels(self):
        torch = pytest.importorskip("torch")
        bn = BatchNorm(3)
        bn.gamma[...] = [0.5, 1.5, 2.0]
        bn.beta[...] = [0.1, -0.2, 0.3]
        x = RNG(8).standard_normal((4, 3, 6))
        dout = RNG(9).standard_normal((4, 3, 6))
        out = bn.forward(x, train=True)
        dx = bn.backward(dout)
        tx = torch.tensor(x, requires_grad=True)
        tbn = torch.nn.BatchNorm1d(3, eps=1e-5, momentum=0.1).double()
        with torch.no_grad():
            tbn.weight[...] = torch.tensor(bn.gamma)
            tbn.bias[...] = torch.tensor(bn.beta)
        ty = tbn(tx)
        ty.backward(torch.tensor(dout))
        assert np.allclose(out, ty.detach().numpy())
        assert np.allclose(dx, tx.grad.numpy())
        assert np.allclose(bn.running_var, tbn.running_var.numpy())


class TestLoss:
    def test_half(self):
        loss, _ = bce_loss(np.array([0.5]), np.array([1.0]))
        assert math.isclose(loss, math.log(2))

    def test_near_perfect(self):
        loss, _ = bce_loss(np.array([1 - 1e-7]), np.array([1.0]))
        assert math.isclose(loss, 1e-7, rel_tol=1e-3)

    def test_clamped_is_finite(self):
        loss, grad = bce_loss(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        assert np.isfinite(loss) and np.all(np.isfinite(grad))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31))
    def test_gradient_finite_difference(self, seed):
        rng = RNG(seed)
        p = rng.uniform(0.05, 0.95, 6)
        t = rng.integers(0, 2, 6).astype(float)
        _, g = bce_loss(p, t)
        eps = 1e-6
        for i in range(6):
            up, down = p.copy(), p.copy()
            up[i] += eps
            down[i] -= eps
            num = (bce_loss(up, t)[0] - bce_loss(down, t)[0]) / (2 * eps)
            assert abs(num - g[i]) <= 1e-6 * max(1.0, abs(g[i]))


class TestAdam:
    def test_first_step(self):
        cfg = TrainConfig(learning_rate=0.01)
        p = np.array([1.0, -2.0])
        g = np.array([0.3, -4.0])
        state = AdamState.zeros_like([p])
        adam_update([p], [g], state, 1, cfg)
        assert np.allclose(p, [1.0 - 0.01, -2.0 + 0.01], atol=1e-8)

    def test_zero_gradient(self):
        p = np.array([3.0])
        adam_update([p], [np.zeros(1)], AdamState.zeros_like([p]), 1, TrainConfig())
        assert p[0] == 3.0

    def test_scalar_descent(self):
        cfg = TrainConfig(learning_rate=0.1)
        theta = np.array([1.0])
        state = AdamState.zeros_like([theta])
        for t in range(1, 101):
            adam_update([theta], [2 * theta], state, t, cfg)
        assert abs(theta[0]) < 0.05

    def test_matches_torch(self):
        torch = pytest.importorskip("torch")
        cfg = TrainConfig(learning_rate=0.05)
        p = np.array([0.7, -1.3, 2.0])
        state = AdamState.zeros_like([p])
        tp = torch.tensor(p.copy(), requires_grad=True)
        opt = torch.optim.Adam([tp], lr=0.05, betas=(0.9, 0.999), eps=1e-8)
        for t in range(1, 30):
            g = np.sin(p * t)
            adam_update([p], [g], state, t, cfg)
            opt.zero_grad()
            tp.grad = torch.tensor(np.sin(tp.detach().numpy() * t))
            opt.step()
        assert np.allclose(p, tp.detach().numpy())


class TestModels:
    def test_dnn_layout(self):
        kinds = [l[0] for l in ModelSpec.dnn(10).layers]
        assert kinds == ["dense", "batchnorm", "relu", "dropout"] * 3 + ["dense", "sigmoid"]
        assert [l for l in ModelSpec.dnn(10).layers if l[0] == "dense"] == [
            ("dense", 10, 128), ("dense", 128, 64), ("dense", 64, 32), ("dense", 32, 1)
        ]

    def test_cnn_layout(self):
        layers = ModelSpec.cnn(12).layers
        assert layers[0] == ("conv1d", 1, 2, 3, 1, 1)
        assert layers[4] == ("conv1d", 2, 4, 3, 1, 1)
        assert ("dense", 48, 4) in layers and ("dropout", 0.6) in layers

    @pytest.mark.parametrize("kind", ["dnn", "cnn"])
    def test_gradient_check(self, kind):
        rng = RNG(11)
        X = rng.standard_normal((4, 7))
        y = np.array([0.0, 1.0, 1.0, 0.0])
        assert gradient_check(ModelSpec.for_kind(kind, 7), X, y, seed=3) < 1e-4

    def test_linear_model_gradient_exact(self):
        spec = ModelSpec("dnn", 3, (("dense", 3, 1),))
        X = RNG(0).standard_normal((4, 3))
        y = RNG(1).standard_normal(4)

        def sq(pred, target):
            return float(0.5 * np.sum((pred - target) ** 2)), pred - target

        assert gradient_check(spec, X, y, loss=sq) < 1e-9

    def test_zeroed_head_gives_half(self):
        net = Network(ModelSpec.dnn(5), RNG(0))
        head = net.layers[-2]
        head.W[...] = 0
        head.b[...] = 0
        prob, labels = predict(net, RNG(1).standard_normal((6, 5)))
        assert np.all(prob == 0.5) and np.all(labels == 1)

    def test_predict_matches_external_threshold(self):
        net = Network(ModelSpec.cnn(6), RNG(2))
        X = RNG(3).standard_normal((10, 6))
        prob, labels = predict(net, X)
        assert np.array_equal(labels, (prob >= 0.5).astype(int))

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            predict(Network(ModelSpec.dnn(5), RNG(0)), np.zeros((2, 4)))

    def test_save_load(self, tmp_path):
        net = Network(ModelSpec.cnn(5), RNG(4))
        save_network(net, tmp_path / "m.json", {"k": 5})
        back, extra = load_network(tmp_path / "m.json")
        X = RNG(5).standard_normal((3, 5))
        assert extra == {"k": 5}
        assert np.array_equal(back.forward(X), net.forward(X))


def toy_split(n=40, seed=0):
    rng = RNG(seed)
    X = rng.standard_normal((n, 2))
    y = (X[:, 0] + X[:, 1] > 0).astype(float)
    return SimpleNamespace(X_train=X, y_train=y, X_val=X[:10], y_val=y[:10])


class TestTraining:
    def test_separable(self):
        model, hist = train_model(ModelSpec.dnn(2), toy_split(), TrainConfig(epochs=200, seed=1))
        assert max(hist.train_acc) == 1.0
        assert len(hist) == 200
        assert all(l >= 0 for l in hist.train_loss + hist.val_loss)
        assert all(0 <= a <= 1 for a in hist.train_acc + hist.val_acc)

    @pytest.mark.parametrize("kind", ["dnn", "cnn"])
    def test_bitwise_determinism(self, kind):
        split = toy_split(24, seed=2)
        spec = ModelSpec.for_kind(kind, 2)
        cfg = TrainConfig(epochs=5, seed=9)
        m1, h1 = train_model(spec, split, cfg)
        m2, h2 = train_model(spec, split, cfg)
        assert h1 == h2
        assert all(np.array_equal(a, b) for a, b in zip(m1.network.params, m2.network.params))

    def test_divergence(self):
        split = toy_split(8)
        split.X_train = split.X_train.copy()
        split.X_train[0, 0] = np.nan
        with pytest.raises(TrainingDivergence, match="divergence at epoch 1"):
            train_model(ModelSpec.dnn(2), split, TrainConfig(epochs=2))

    def test_config_validation(self):
        for bad in (dict(epochs=0), dict(batch_size=0), dict(learning_rate=0)):
            with pytest.raises(ValueError):
                TrainConfig(**bad)
