"""
Unit tests for dense attention scores, forward passes and the invariance suite.
"""

import math
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from ecoattn.attention import (
    AttentionSpec,
    ScoreKind,
    attention_forward,
    dot_equivalence_check,
    l1_distance_matrix,
    lp_distance_matrix,
    parse_kind,
    score_matrix,
)
from ecoattn.exceptions import ConfigurationError, DimensionError, ParameterError
from ecoattn.tensor import Rng, l2_normalize_rows, rand_matrix, softmax_rows


def brute_force_l1(q, k):
    out = np.zeros((q.shape[0], k.shape[0]))
    for i in range(q.shape[0]):
        for j in range(k.shape[0]):
            out[i, j] = sum(abs(q[i, m] - k[j, m]) for m in range(q.shape[1]))
    return out


class TestDistances(unittest.TestCase):
    """Test cases for the distance matrices."""

    def test_l1_hand_example(self):
        """Double-loop values for a 2 x 2 case."""
        assert_array_equal(l1_distance_matrix([[1, 2], [3, 4]], [[1, 2], [0, 0]]), [[0, 3], [4, 7]])

    def test_l1_zero_diagonal(self):
        q = rand_matrix(Rng(2), 5, 3, 1.0)
        assert_array_equal(np.diag(l1_distance_matrix(q, q)), np.zeros(5))

    def test_l1_brute_force(self):
        """Random 8 x 16 against a scalar triple loop."""
        rng = Rng(17)
        q = rand_matrix(rng, 8, 16, 1.0)
        k = rand_matrix(rng, 8, 16, 1.0)
        assert_allclose(l1_distance_matrix(q, k), brute_force_l1(q, k), atol=1e-12)

    def test_l1_width_mismatch(self):
        with self.assertRaises(DimensionError):
            l1_distance_matrix(np.ones((2, 3)), np.ones((2, 4)))

    def test_lp_examples(self):
        """p = 2 reproduces the 3-4-5 triangle; p = 1 matches L1."""
        assert_allclose(lp_distance_matrix([[0, 0]], [[3, 4]], 2.0), [[5.0]], atol=1e-12)
        rng = Rng(4)
        q = rand_matrix(rng, 4, 6, 1.0)
        k = rand_matrix(rng, 3, 6, 1.0)
        assert_allclose(lp_distance_matrix(q, k, 1.0), l1_distance_matrix(q, k), atol=1e-12)

    def test_lp_bad_exponent(self):
        """p < 1 and non-finite p are rejected."""
        for p in (0.5, float("inf"), float("nan")):
            with self.assertRaises(ParameterError):
                lp_distance_matrix([[0.0]], [[1.0]], p)


class TestScoresAndForward(unittest.TestCase):
    """Test cases for score_matrix and attention_forward."""

    def test_zero_lambda_scores(self):
        spec = AttentionSpec(ScoreKind.L1, 0.0, 3)
        rng = Rng(8)
        s = score_matrix(spec, rand_matrix(rng, 4, 3, 1.0), rand_matrix(rng, 5, 3, 1.0))
        assert_array_equal(s, np.zeros((4, 5)))

    def test_single_feature_l1(self):
        """q = [[0]], k = [[0], [1]] gives S = [[0, -1]] and o = 1/(1+e^-1)."""
        spec = AttentionSpec(ScoreKind.L1, 1.0, 1)
        assert_allclose(score_matrix(spec, [[0.0]], [[0.0], [1.0]]), [[0.0, -1.0]], atol=1e-15)
        o, alpha = attention_forward(spec, [[0.0]], [[0.0], [1.0]], [[1.0], [0.0]])
        assert_allclose(o, [[1.0 / (1.0 + math.exp(-1.0))]], atol=1e-12)
        self.assertAlmostEqual(o[0, 0], 0.73106, places=5)
        assert_allclose(alpha.sum(axis=1), [1.0], atol=1e-15)

    def test_dot_product_identity_rows(self):
        """<e_i, e_j> / sqrt(4) = delta_ij / 2."""
        spec = AttentionSpec(ScoreKind.DOT_PRODUCT, 0.0, 4)
        assert_allclose(score_matrix(spec, np.eye(4), np.eye(4)), np.eye(4) / 2, atol=1e-15)

    def test_squared_l2_scores(self):
        spec = AttentionSpec(ScoreKind.SQUARED_L2, 2.0, 4)
        s = score_matrix(spec, [[0.0, 0.0, 0.0, 0.0]], [[1.0, 1.0, 0.0, 0.0]])
        assert_allclose(s, [[-2.0 * 2.0 / 2.0]], atol=1e-15)

    def test_single_key_returns_value(self):
        """With one key every query gets weight 1 on it, for every kind."""
        rng = Rng(31)
        q = rand_matrix(rng, 4, 3, 1.0)
        k = rand_matrix(rng, 1, 3, 1.0)
        v = rand_matrix(rng, 1, 2, 1.0)
        for kind in ScoreKind:
            o, alpha = attention_forward(AttentionSpec(kind, 2.0, 3, p=3.0), q, k, v)
            assert_allclose(alpha, np.ones((4, 1)), atol=1e-15, err_msg=kind.value)
            assert_allclose(o, np.repeat(v, 4, axis=0), atol=1e-15, err_msg=kind.value)

    def test_zero_lambda_averages_values(self):
        """L1 with lambda = 0 weights keys uniformly, so o is the column mean of v."""
        rng = Rng(32)
        q = rand_matrix(rng, 3, 4, 1.0)
        k = rand_matrix(rng, 5, 4, 1.0)
        v = rand_matrix(rng, 5, 2, 1.0)
        o, _ = attention_forward(AttentionSpec(ScoreKind.L1, 0.0, 4), q, k, v)
        assert_allclose(o, np.tile(v.mean(axis=0), (3, 1)), atol=1e-12)

    def test_mask_zeroes_weights(self):
        """Masked entries receive no attention."""
        mask = np.array([[True, False, True], [False, True, True]])
        spec = AttentionSpec(ScoreKind.L1, 1.0, 2, mask=mask)
        rng = Rng(21)
        _, alpha = attention_forward(spec, rand_matrix(rng, 2, 2, 1.0), rand_matrix(rng, 3, 2, 1.0),
                                     rand_matrix(rng, 3, 2, 1.0))
        assert_array_equal(alpha[~mask], np.zeros(2))
        assert_allclose(alpha.sum(axis=1), np.ones(2), atol=1e-12)

    def test_mask_validation(self):
        """An all-false row and a wrongly shaped mask are rejected."""
        with self.assertRaises(ConfigurationError):
            AttentionSpec(ScoreKind.L1, 1.0, 2, mask=np.array([[True, False], [False, False]]))
        spec = AttentionSpec(ScoreKind.L1, 1.0, 2, mask=np.ones((2, 2), dtype=bool))
        with self.assertRaises(DimensionError):
            score_matrix(spec, np.ones((3, 2)), np.ones((2, 2)))

    def test_spec_validation(self):
        with self.assertRaises(ParameterError):
            AttentionSpec(ScoreKind.L1, -1.0, 2)
        with self.assertRaises(ConfigurationError):
            AttentionSpec(ScoreKind.L1, 1.0, 0)
        with self.assertRaises(DimensionError):
            score_matrix(AttentionSpec(ScoreKind.L1, 1.0, 3), np.ones((2, 2)), np.ones((2, 2)))

    def test_parse_kind(self):
        self.assertIs(parse_kind("dot"), ScoreKind.DOT_PRODUCT)
        self.assertIs(parse_kind("l1"), ScoreKind.L1)
        self.assertIs(parse_kind("squared-l2"), ScoreKind.SQUARED_L2)
        with self.assertRaises(ConfigurationError):
            parse_kind("cosine")


class TestInvariances(unittest.TestCase):
    """Properties every distance score must satisfy."""

    def setUp(self):
        rng = Rng(2024)
        self.q = rand_matrix(rng, 6, 5, 1.0)
        self.k = rand_matrix(rng, 7, 5, 1.0)
        self.v = rand_matrix(rng, 7, 3, 1.0)
        self.spec = AttentionSpec(ScoreKind.L1, 1.5, 5)

    def test_translation_invariance(self):
        """Shifting q and k by one vector leaves distance-kind weights unchanged."""
        shift = np.array([0.3, -1.2, 2.0, 0.0, 0.7])
        for kind in (ScoreKind.L1, ScoreKind.SQUARED_L2, ScoreKind.LP):
            spec = AttentionSpec(kind, 1.5, 5, p=3.0)
            o, alpha = attention_forward(spec, self.q, self.k, self.v)
            o_shifted, shifted = attention_forward(spec, self.q + shift, self.k + shift, self.v)
            assert_allclose(shifted, alpha, atol=1e-12, err_msg=kind.value)
            assert_allclose(o_shifted, o, atol=1e-12, err_msg=kind.value)

    def test_dot_product_not_translation_invariant(self):
        """The same shift moves dot-product weights."""
        shift = np.array([0.3, -1.2, 2.0, 0.0, 0.7])
        spec = AttentionSpec(ScoreKind.DOT_PRODUCT, 0.0, 5)
        _, alpha = attention_forward(spec, self.q, self.k, self.v)
        _, shifted = attention_forward(spec, self.q + shift, self.k + shift, self.v)
        self.assertGreater(np.abs(shifted - alpha).max(), 1e-6)

    def test_scale_lambda_duality(self):
        """Scaling inputs by c equals scaling lambda by c."""
        c = 2.5
        _, scaled_inputs = attention_forward(self.spec, c * self.q, c * self.k, self.v)
        _, scaled_lambda = attention_forward(self.spec.with_lambda(c * self.spec.lam), self.q, self.k, self.v)
        assert_allclose(scaled_inputs, scaled_lambda, atol=1e-12)

    def test_row_stochastic(self):
        for kind in ScoreKind:
            spec = AttentionSpec(kind, 1.0, 5, p=3.0)
            _, alpha = attention_forward(spec, self.q, self.k, self.v)
            assert_allclose(alpha.sum(axis=1), np.ones(6), atol=1e-12)
            self.assertTrue(np.all(alpha >= 0))

    def test_key_value_permutation(self):
        """Permuting keys with their values leaves the output unchanged."""
        perm = Rng(5).permutation(7)
        o, alpha = attention_forward(self.spec, self.q, self.k, self.v)
        o_perm, alpha_perm = attention_forward(self.spec, self.q, self.k[perm], self.v[perm])
        assert_allclose(o_perm, o, atol=1e-12)
        assert_allclose(alpha_perm, alpha[:, perm], atol=1e-12)

    def test_softmax_shift(self):
        """Adding a per-row constant to the scores does not change the weights."""
        s = score_matrix(self.spec, self.q, self.k)
        shifts = np.linspace(-40.0, 25.0, s.shape[0])[:, np.newaxis]
        assert_allclose(softmax_rows(s + shifts), softmax_rows(s), atol=1e-12)



class TestDotEquivalence(unittest.TestCase):
    """Squared-L2 at lambda = 1/2 reproduces dot-product attention on unit rows."""

    def test_seeded_instances(self):
        """100 random instances with N <= 16 and Dk <= 32."""
        for seed in range(100):
            rng = Rng(seed)
            n = 1 + seed % 16
            d_k = 1 + (7 * seed) % 32
            q = rand_matrix(rng, n, d_k, 1.0)
            k = rand_matrix(rng, n, d_k, 1.0)
            v = rand_matrix(rng, n, d_k, 1.0)
            self.assertLess(dot_equivalence_check(q, k, v), 1e-10, msg=f"seed {seed}")

    def test_orthonormal_rows(self):
        v = rand_matrix(Rng(3), 4, 4, 1.0)
        self.assertLess(dot_equivalence_check(np.eye(4), np.eye(4), v), 1e-12)

    def test_huge_rows(self):
        """Rows scaled near the float limit normalize to the same unit rows."""
        rng = Rng(9)
        q = rand_matrix(rng, 6, 8, 1.0)
        k = rand_matrix(rng, 6, 8, 1.0)
        v = rand_matrix(rng, 6, 8, 1.0)
        assert_allclose(l2_normalize_rows(1e200 * q), l2_normalize_rows(q), atol=1e-15)
        self.assertLess(dot_equivalence_check(1e200 * q, 1e200 * k, v), 1e-10)
        _, alpha = attention_forward(AttentionSpec(ScoreKind.DOT_PRODUCT, 0.0, 8), l2_normalize_rows(1e200 * q),
                                     l2_normalize_rows(1e200 * k), v)
        # zeroed rows would give uniform weights
        self.assertGreater(np.abs(alpha - 1.0 / 6).max(), 1e-3)

    def test_other_lambda_breaks_equivalence(self):
        """lambda = 1 is a negative control."""
        rng = Rng(42)
        q = rand_matrix(rng, 6, 8, 1.0)
        k = rand_matrix(rng, 6, 8, 1.0)
        v = rand_matrix(rng, 6, 8, 1.0)
        self.assertGreater(dot_equivalence_check(q, k, v, lam=1.0), 1e-6)


if __name__ == "__main__":
    unittest.main()
