import numpy as np
import pytest

from chorus.nn import ACTIVATION_KINDS, activation, activation_backward, softmax


class TestPointValues:
    def test_relu(self):
        out = activation("relu", np.array([-1.0, 3.0]))
        assert out.tolist() == [0.0, 3.0]

    def test_zero_input_symmetry(self):
        assert activation("sigmoid", np.array([0.0]))[0] == 0.5
        assert activation("hard_sigmoid", np.array([0.0]))[0] == 0.5
        assert activation("gelu", np.array([0.0]))[0] == 0.0
        assert activation("swish", np.array([0.0]))[0] == 0.0

    def test_linear_and_tanh(self):
        x = np.array([-2.0, 0.5])
        assert np.array_equal(activation("linear", x), x)
        assert np.allclose(activation("tanh", x), np.tanh(x))

    def test_elu_negative_branch(self):
        assert activation("elu", np.array([-1.0]))[0] == pytest.approx(np.expm1(-1))

    def test_exponential(self):
        assert activation("exponential", np.array([2.0]))[0] == pytest.approx(np.exp(2))

    def test_hard_sigmoid_saturates(self):
        out = activation("hard_sigmoid", np.array([-10.0, 10.0]))
        assert out.tolist() == [0.0, 1.0]

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            activation("selu", np.zeros(3))


class TestSoftmax:
    def test_uniform_on_constant_rows(self):
        out = activation("softmax", np.full((2, 10), 3.7))
        assert np.allclose(out, 0.1)
        assert np.allclose(out.sum(axis=1), 1.0)

    def test_shift_invariance(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(4, 10))
        assert np.allclose(softmax(x), softmax(x + 100.0), atol=1e-5)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(1)
        out = softmax(rng.normal(scale=20, size=(8, 10)))
        assert (out >= 0).all()
        assert np.allclose(out.sum(axis=1), 1.0, atol=1e-5)


class TestBackwardMatchesFiniteDifference:
    @pytest.mark.parametrize("kind", ACTIVATION_KINDS)
    def test_elementwise_gradient(self, kind):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(3, 12))
        g = rng.normal(size=(3, 12))
        eps = 1e-6
        analytic = activation_backward(kind, x, g)
        numeric = np.zeros_like(x)
        for idx in np.ndindex(x.shape):
            xp, xm = x.copy(), x.copy()
            xp[idx] += eps
            xm[idx] -= eps
            diff = (activation(kind, xp) - activation(kind, xm)) / (2 * eps)
            numeric[idx] = (g * diff).sum() if kind == "softmax" else g[idx] * diff[idx]
        assert np.allclose(analytic, numeric, rtol=1e-4, atol=1e-6)
