import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from graphgan import LabeledPair, d_score, discriminator_step, log_likelihood, pair_gradient


class TestScore:
    def test_zero_product(self):
        assert d_score(0, 1, np.array([[1.0, 0.0], [0.0, 1.0]])) == 0.5

    def test_all_ones_k20(self):
        theta = np.ones((2, 20))
        expected = 1.0 / (1.0 + math.exp(-20.0))
        assert d_score(0, 1, theta) == expected
        assert abs((1.0 - d_score(0, 1, theta)) - 2.06e-9) < 0.01e-9

    @settings(max_examples=100, deadline=None)
    @given(arrays(np.float64, (2, 7), elements=st.floats(-50, 50)))
    def test_symmetric_and_bounded(self, theta):
        a, b = d_score(0, 1, theta), d_score(1, 0, theta)
        assert a == b
        assert 0.0 <= a <= 1.0

    def test_pair_needs_distinct_vertices(self):
        with pytest.raises(ValueError):
            LabeledPair(3, 3, 1)


def objective(theta, pairs):
    """Labelled log-likelihood written out pair by pair."""
    total = 0.0
    for p in pairs:
        x = float(theta[p.v] @ theta[p.center])
        total += -math.log1p(math.exp(-x)) if p.label else -math.log1p(math.exp(x))
    return total


class TestStep:
    def test_saturated_positive_is_fixed(self):
        theta = np.full((2, 4), 20.0)
        assert d_score(0, 1, theta) == 1.0
        out = discriminator_step([LabeledPair(0, 1, 1)], theta, 0.1)
        np.testing.assert_array_equal(out, theta)

    def test_zero_embeddings_positive_is_fixed(self):
        theta = np.zeros((3, 4))
        out = discriminator_step([LabeledPair(0, 1, 1)], theta, 0.1)
        np.testing.assert_array_equal(out, theta)

    def test_empty_batch(self):
        theta = np.ones((2, 2))
        np.testing.assert_array_equal(discriminator_step([], theta, 0.1), theta)

    def test_only_pair_rows_change(self):
        rng = np.random.default_rng(0)
        theta = rng.normal(size=(6, 3))
        out = discriminator_step([LabeledPair(1, 4, 0)], theta, 0.05)
        changed = np.flatnonzero(np.any(out != theta, axis=1))
        assert changed.tolist() == [1, 4]

    def test_single_pair_coefficients(self):
        rng = np.random.default_rng(1)
        theta = rng.normal(size=(3, 4))
        lr = 0.01
        d = d_score(0, 2, theta)
        pos = discriminator_step([LabeledPair(0, 2, 1)], theta, lr)
        np.testing.assert_allclose(pos[0] - theta[0], lr * (1 - d) * theta[2], rtol=1e-12)
        np.testing.assert_allclose(pos[2] - theta[2], lr * (1 - d) * theta[0], rtol=1e-12)
        neg = discriminator_step([LabeledPair(0, 2, 0)], theta, lr)
        np.testing.assert_allclose(neg[0] - theta[0], -lr * d * theta[2], rtol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        n, k = 6, int(rng.choice([2, 5, 20]))
        theta = rng.uniform(-1, 1, (n, k))
        pairs = []
        for _ in range(8):
            u, v = rng.choice(n, 2, replace=False)
            pairs.append(LabeledPair(int(u), int(v), int(rng.integers(2))))
        v = np.array([p.v for p in pairs])
        vc = np.array([p.center for p in pairs])
        labels = np.array([p.label for p in pairs])
        grad, loglik = pair_gradient(theta, v, vc, labels)
        assert loglik == pytest.approx(objective(theta, pairs), rel=1e-12)
        h = 1e-5
        numeric = np.zeros_like(theta)
        for idx in np.ndindex(*theta.shape):
            up, down = theta.copy(), theta.copy()
            up[idx] += h
            down[idx] -= h
            numeric[idx] = (objective(up, pairs) - objective(down, pairs)) / (2 * h)
        err = np.linalg.norm(grad - numeric) / max(np.linalg.norm(numeric), 1e-12)
        assert err < 1e-4

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.sampled_from([1e-4, 1e-3, 1e-2]))
    def test_positive_step_never_lowers_log_d(self, seed, lr):
        theta = np.random.default_rng(seed).uniform(-1, 1, (2, 20))
        pair = [LabeledPair(0, 1, 1)]
        assert log_likelihood(pair, discriminator_step(pair, theta, lr)) >= log_likelihood(pair, theta)

    def test_log_likelihood_stable_far_out(self):
        theta = np.array([[40.0], [40.0]])
        assert log_likelihood([LabeledPair(0, 1, 0)], theta) == pytest.approx(-1600.0)
        assert log_likelihood([LabeledPair(0, 1, 1)], theta) == 0.0
