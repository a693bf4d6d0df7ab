import numpy as np
import pytest

from chorus.nn import OPTIMIZER_KINDS, make_optimizer, optimizer_step


def quadratic_loss(w):
    return 0.5 * float((w ** 2).sum())


class TestUpdateRules:
    def test_sgd_formula(self):
        w = np.array([1.0])
        opt = make_optimizer("sgd")
        opt.step([w], [np.array([1.0])])
        assert w[0] == pytest.approx(0.99)

    @pytest.mark.parametrize("kind", OPTIMIZER_KINDS)
    def test_zero_gradient_fixed_point(self, kind):
        w = np.array([1.5, -0.25, 3.0])
        original = w.copy()
        opt = make_optimizer(kind)
        for _ in range(3):
            opt.step([w], [np.zeros(3)])
        assert np.array_equal(w, original)

    def test_adam_first_step_magnitude(self):
        # scalar trace: with constant gradient the bias-corrected first step
        # is lr * g / (|g| + eps) ~= lr
        w = np.array([2.0])
        opt = make_optimizer("adam")
        opt.step([w], [np.array([0.5])])
        step = 2.0 - w[0]
        assert step == pytest.approx(0.001, rel=1e-3)

    def test_adam_scalar_sequence(self):
        # hand-computed two-step trace, g = 1 throughout
        lr, b1, b2, eps = 0.001, 0.9, 0.999, 1e-7
        m = v = 0.0
        w_ref = 1.0
        for t in (1, 2):
            m = b1 * m + (1 - b1) * 1.0
            v = b2 * v + (1 - b2) * 1.0
            w_ref -= lr * (m / (1 - b1 ** t)) / (np.sqrt(v / (1 - b2 ** t)) + eps)
        w = np.array([1.0])
        opt = make_optimizer("adam")
        for _ in range(2):
            opt.step([w], [np.array([1.0])])
        assert w[0] == pytest.approx(w_ref, rel=1e-9)


class TestConvexDescent:
    @pytest.mark.parametrize("kind", OPTIMIZER_KINDS)
    def test_loss_reduced_after_200_steps(self, kind):
        w = np.array([1.0, -2.0, 0.5])
        start = quadratic_loss(w)
        opt = make_optimizer(kind)
        for _ in range(200):
            opt.step([w], [w.copy()])  # gradient of 0.5*w^2 is w
        assert quadratic_loss(w) < start


class TestFunctionalWrapper:
    def test_state_threading(self):
        w = np.array([1.0])
        state = optimizer_step("sgd", None, [w], [np.array([1.0])])
        optimizer_step("sgd", state, [w], [np.array([1.0])])
        assert w[0] == pytest.approx(0.98)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_optimizer("lion")
