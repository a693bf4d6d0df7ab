import numpy as np
import pytest

from chorus.nn import (
    ACTIVATION_KINDS,
    Architecture,
    TrainingPlan,
    evaluate,
    forward,
    loss_and_gradients,
    train,
)
from chorus.nn.activations import softmax
from chorus.nn.network import init_model


def make_model(activation="relu", hidden_layers=1, width=16, dropout=False,
               seed=0, dtype=np.float32):
    arch = Architecture(hidden_layers=hidden_layers, activation=activation,
                        dropout=dropout, hidden_width=width)
    return init_model(arch, np.random.default_rng(seed), dtype=dtype)


def random_batch(n=8, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.random((n, 784))
    y = rng.integers(0, 10, n)
    return x, y


class TestForward:
    def test_rows_sum_to_one(self):
        model = make_model(hidden_layers=3)
        x, _ = random_batch(16)
        probs = forward(model, x)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-5)
        assert (probs >= 0).all()

    def test_uint8_images_are_scaled(self):
        model = make_model()
        imgs = np.random.default_rng(0).integers(0, 256, (4, 28, 28), dtype=np.uint8)
        p1 = forward(model, imgs)
        p2 = forward(model, imgs.reshape(4, 784).astype(np.float32) / 255.0)
        assert np.allclose(p1, p2, atol=1e-6)

    def test_dropout_off_train_equals_eval(self):
        model = make_model(dropout=False)
        x, _ = random_batch()
        assert np.allclose(forward(model, x, train_mode=True),
                           forward(model, x, train_mode=False))

    def test_dropout_masks_in_train_mode_only(self):
        model = make_model(dropout=True, width=128)
        x, _ = random_batch()
        rng = np.random.default_rng(5)
        masked = forward(model, x, train_mode=True, rng=rng)
        plain = forward(model, x, train_mode=False)
        assert not np.allclose(masked, plain)
        assert np.allclose(forward(model, x), plain)

    def test_linear_network_matches_matrix_oracle(self):
        model = make_model(activation="linear")
        x, _ = random_batch(5, seed=3)
        w0, b0 = model.weights[0], model.biases[0]
        w1, b1 = model.weights[1], model.biases[1]
        logits = (x.astype(np.float32) @ w0 + b0) @ w1 + b1
        assert np.allclose(forward(model, x), softmax(logits), atol=1e-5)

    def test_shape_mismatch(self):
        model = make_model()
        with pytest.raises(ValueError):
            forward(model, np.zeros((2, 100)))


class TestLossAndGradients:
    def test_uniform_prediction_loss(self):
        model = make_model()
        for w in model.weights:
            w[...] = 0.0
        x, y = random_batch()
        loss, _ = loss_and_gradients(model, x, y)
        assert loss == pytest.approx(np.log(10), abs=1e-5)

    def test_perfect_prediction_loss_near_zero(self):
        model = make_model(activation="linear")
        x, y = random_batch(4)
        # inflate the output bias of the true class to saturate softmax
        model.weights[1][...] = 0.0
        model.weights[0][...] = 0.0
        model.biases[1][...] = -50.0
        loss0, _ = loss_and_gradients(model, x, np.zeros(4, dtype=int))
        model.biases[1][0] = 50.0
        loss, _ = loss_and_gradients(model, x, np.zeros(4, dtype=int))
        assert loss < 1e-6 < loss0

    def test_bad_labels(self):
        model = make_model()
        x, _ = random_batch(4)
        with pytest.raises(ValueError):
            loss_and_gradients(model, x, np.array([0, 1, 2, 11]))

    @pytest.mark.parametrize("kind", ACTIVATION_KINDS)
    def test_gradients_match_finite_differences(self, kind):
        model = make_model(activation=kind, seed=1, dtype=np.float64)
        x, y = random_batch(6, seed=2)
        _, grads = loss_and_gradients(model, x, y, dtype=np.float64)
        rng = np.random.default_rng(0)
        eps = 1e-5
        for p, g in zip(model.params(), grads):
            flat = p.reshape(-1)
            for k in rng.choice(flat.size, min(6, flat.size), replace=False):
                old = flat[k]
                flat[k] = old + eps
                lp, _ = loss_and_gradients(model, x, y, dtype=np.float64)
                flat[k] = old - eps
                lm, _ = loss_and_gradients(model, x, y, dtype=np.float64)
                flat[k] = old
                numeric = (lp - lm) / (2 * eps)
                analytic = g.reshape(-1)[k]
                denom = max(abs(numeric), abs(analytic), 1e-8)
                assert abs(numeric - analytic) / denom < 1e-4


class TestTrain:
    def _toy_data(self, n=300, seed=0):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 2, n)
        x = rng.normal(0, 0.01, (n, 784)).astype(np.float32)
        x[np.arange(n), labels * 3] += 1.0
        return np.clip(x, 0, 1), labels

    def test_no_validation_runs_full_epoch_budget(self):
        x, y = self._toy_data(100)
        plan = TrainingPlan(batch_size=32, optimizer="sgd", use_validation=False,
                            max_epochs=7, seed=0)
        model = train(Architecture(), plan, x, y)
        assert model.epochs_trained == 7
        assert len(model.train_loss_history) == 7
        assert model.val_loss_history == []

    def test_determinism_bit_identical(self):
        x, y = self._toy_data()
        plan = TrainingPlan(batch_size=32, optimizer="adam", use_validation=True,
                            max_epochs=4, seed=11)
        arch = Architecture(dropout=True)
        m1 = train(arch, plan, x, y)
        m2 = train(arch, plan, x, y)
        for w1, w2 in zip(m1.weights, m2.weights):
            assert np.array_equal(w1, w2)
        assert m1.train_loss_history == m2.train_loss_history

    def test_linearly_separable_convergence(self):
        x, y = self._toy_data(400)
        plan = TrainingPlan(batch_size=32, optimizer="sgd", use_validation=False,
                            max_epochs=100, seed=2)
        model = train(Architecture(), plan, x, y)
        acc, _, _ = evaluate(model, x, y)
        assert acc == 1.0

    def test_validation_history_and_early_stop(self):
        x, y = self._toy_data(300)
        plan = TrainingPlan(batch_size=32, optimizer="adam", use_validation=True,
                            patience=2, max_epochs=60, seed=3)
        model = train(Architecture(), plan, x, y)
        assert len(model.val_loss_history) == model.epochs_trained
        assert model.epochs_trained <= 60

    def test_empty_dataset(self):
        with pytest.raises(ValueError):
            train(Architecture(), TrainingPlan(), np.zeros((0, 784)), np.zeros(0))


class TestEvaluate:
    def test_uniform_model_tie_breaks_to_class_zero(self):
        model = make_model()
        for w in model.weights:
            w[...] = 0.0
        imgs = np.random.default_rng(0).integers(0, 256, (5, 28, 28), dtype=np.uint8)
        acc, preds, confs = evaluate(model, imgs, np.array([0, 1, 2, 3, 4]))
        assert preds.tolist() == [0, 0, 0, 0, 0]
        assert np.allclose(confs, 0.1, atol=1e-6)
        assert acc == pytest.approx(0.2)

    def test_enumeration_oracle(self):
        model = make_model(seed=9)
        imgs = np.random.default_rng(1).integers(0, 256, (5, 28, 28), dtype=np.uint8)
        labels = np.array([1, 2, 3, 4, 5])
        acc, preds, confs = evaluate(model, imgs, labels)
        probs = forward(model, imgs)
        for i in range(5):
            assert preds[i] == probs[i].argmax()
            assert confs[i] == pytest.approx(probs[i].max(), abs=1e-6)
        assert acc == pytest.approx((preds == labels).mean())

    def test_repeatable(self):
        model = make_model(dropout=True)
        imgs = np.random.default_rng(2).integers(0, 256, (4, 28, 28), dtype=np.uint8)
        r1 = evaluate(model, imgs, np.zeros(4, dtype=int))
        r2 = evaluate(model, imgs, np.zeros(4, dtype=int))
        assert np.array_equal(r1[1], r2[1])
        assert np.array_equal(r1[2], r2[2])
