"""
Unit tests for sliding-window and projection attention.
"""

import unittest

import numpy as np
from numpy.testing import assert_allclose

from ecoattn.accounting import OpCounter, score_op_counts
from ecoattn.attention import AttentionSpec, ScoreKind, attention_forward
from ecoattn.exceptions import ConfigurationError, DimensionError
from ecoattn.sparse import (
    ProjectionSpec,
    WindowSpec,
    identity_projection,
    linformer_l1_forward,
    longformer_l1_forward,
    longformer_score_op_counts,
    longformer_window,
    parse_global_indices,
    random_projection,
)
from ecoattn.tensor import Rng, rand_matrix


def random_qkv(seed, n, d_k):
    rng = Rng(seed)
    return tuple(rand_matrix(rng, n, d_k, 1.0) for _ in range(3))


class TestWindowSpec(unittest.TestCase):
    """Test cases for WindowSpec and the clipped windows."""

    def test_window_validation(self):
        for bad in (0, 1, 3):
            with self.assertRaises(ConfigurationError):
                WindowSpec(bad)
        with self.assertRaises(ConfigurationError):
            WindowSpec(2, (-1,))
        with self.assertRaises(ConfigurationError):
            WindowSpec(2, (7,)).validate_for(5)

    def test_global_indices_normalized(self):
        self.assertEqual(WindowSpec(2, (5, 1, 5)).global_indices, (1, 5))
        self.assertEqual(tuple(parse_global_indices("0,3")), (0, 3))
        self.assertEqual(tuple(parse_global_indices("")), ())
        with self.assertRaises(ConfigurationError):
            parse_global_indices("a,b")

    def test_clipped_windows(self):
        self.assertEqual(list(longformer_window(0, 10, 4)), [0, 1, 2])
        self.assertEqual(list(longformer_window(5, 10, 4)), [3, 4, 5, 6, 7])
        self.assertEqual(list(longformer_window(9, 10, 4)), [7, 8, 9])
        with self.assertRaises(ConfigurationError):
            longformer_window(10, 10, 4)


class TestLongformer(unittest.TestCase):
    """Test cases for longformer_l1_forward."""

    def test_wide_window_matches_dense(self):
        """w >= 2N and no globals reproduce dense attention over 50 seeds."""
        for seed in range(50):
            n = 1 + seed % 9
            d_k = 1 + seed % 6
            q, k, v = random_qkv(seed, n, d_k)
            spec = AttentionSpec(ScoreKind.L1, 1.0 + seed % 3, d_k)
            dense, _ = attention_forward(spec, q, k, v)
            win = WindowSpec(2 * n if n % 2 == 0 else 2 * n + 2)
            assert_allclose(longformer_l1_forward(spec, win, q, k, v), dense, atol=1e-12, err_msg=f"seed {seed}")

    def test_single_token(self):
        q, k, v = random_qkv(1, 1, 3)
        spec = AttentionSpec(ScoreKind.L1, 1.0, 3)
        assert_allclose(longformer_l1_forward(spec, WindowSpec(2), q, k, v), v, atol=1e-15)

    def test_all_global_doubles_dense(self):
        """Window and global terms both equal the dense result."""
        n, d_k = 6, 4
        q, k, v = random_qkv(9, n, d_k)
        spec = AttentionSpec(ScoreKind.L1, 1.0, d_k)
        dense, _ = attention_forward(spec, q, k, v)
        win = WindowSpec(2 * n, tuple(range(n)))
        assert_allclose(longformer_l1_forward(spec, win, q, k, v), 2.0 * dense, atol=1e-12)

    def test_locality(self):
        """Without globals, perturbing a value outside the window leaves the token unchanged."""
        n, d_k = 10, 3
        q, k, v = random_qkv(12, n, d_k)
        spec = AttentionSpec(ScoreKind.L1, 1.0, d_k)
        win = WindowSpec(2)
        base = longformer_l1_forward(spec, win, q, k, v)
        v2, k2 = v.copy(), k.copy()
        v2[8] += 5.0
        k2[8] -= 3.0
        moved = longformer_l1_forward(spec, win, q, k2, v2)
        assert_allclose(moved[:7], base[:7], atol=1e-15)
        self.assertFalse(np.allclose(moved[8], base[8]))

    def test_dense_mask_rejected(self):
        spec = AttentionSpec(ScoreKind.L1, 1.0, 2, mask=np.ones((3, 3), dtype=bool))
        q, k, v = random_qkv(0, 3, 2)
        with self.assertRaises(ConfigurationError):
            longformer_l1_forward(spec, WindowSpec(2), q, k, v)

    def test_op_counts_match_counter(self):
        """The clipped closed form equals the instrumented tally."""
        n, d_k = 9, 4
        q, k, v = random_qkv(3, n, d_k)
        spec = AttentionSpec(ScoreKind.L1, 1.0, d_k)
        win = WindowSpec(4, (0, 8))
        counter = OpCounter()
        longformer_l1_forward(spec, win, q, k, v, counter)
        self.assertEqual(counter.tally, longformer_score_op_counts(n, win, d_k))
        self.assertEqual(counter.tally.mults, 0)

    def test_op_counts_unclipped_closed_form(self):
        """w >= 2N gives N (min(w+1, N) + |G|) Dk absolute differences."""
        n, d_k = 5, 3
        win = WindowSpec(10, (1, 2))
        tally = longformer_score_op_counts(n, win, d_k)
        self.assertEqual(tally.abs_diffs, n * (min(10 + 1, n) + 2) * d_k)
        self.assertEqual(tally.adds, tally.abs_diffs)


class TestLinformer(unittest.TestCase):
    """Test cases for linformer_l1_forward."""

    def test_identity_projection_matches_dense(self):
        for seed in range(50):
            n = 1 + seed % 8
            d_k = 1 + seed % 5
            q, k, v = random_qkv(100 + seed, n, d_k)
            spec = AttentionSpec(ScoreKind.L1, 1.0, d_k)
            dense, _ = attention_forward(spec, q, k, v)
            assert_allclose(linformer_l1_forward(spec, identity_projection(n), q, k, v), dense, atol=1e-12)

    def test_single_pseudo_key(self):
        """k_dim = 1 collapses every row onto E_V V."""
        q, k, v = random_qkv(4, 6, 3)
        proj = random_projection(Rng(8), 1, 6)
        spec = AttentionSpec(ScoreKind.L1, 1.0, 3)
        out = linformer_l1_forward(spec, proj, q, k, v)
        assert_allclose(out, np.repeat(proj.e_v @ v, 6, axis=0), atol=1e-12)

    def test_two_step_oracle(self):
        """Random 8 x 16 with k_dim = 4 against composing by hand."""
        q, k, v = random_qkv(5, 8, 16)
        proj = random_projection(Rng(6), 4, 8)
        spec = AttentionSpec(ScoreKind.L1, 2.0, 16)
        expected, _ = attention_forward(spec, q, proj.e_k @ k, proj.e_v @ v)
        assert_allclose(linformer_l1_forward(spec, proj, q, k, v), expected, atol=1e-12)

    def test_projection_entries(self):
        proj = random_projection(Rng(2), 4, 10)
        self.assertEqual(proj.e_k.shape, (4, 10))
        self.assertTrue(np.all(np.abs(proj.e_k) <= 0.5))
        self.assertFalse(np.array_equal(proj.e_k, proj.e_v))

    def test_shape_mismatch(self):
        q, k, v = random_qkv(0, 5, 2)
        spec = AttentionSpec(ScoreKind.L1, 1.0, 2)
        with self.assertRaises(DimensionError):
            linformer_l1_forward(spec, identity_projection(4), q, k, v)
        with self.assertRaises(DimensionError):
            ProjectionSpec(2, np.ones((3, 4)), np.ones((3, 4)))

    def test_linear_score_cost(self):
        """Scores cost N k Dk rather than N^2 Dk."""
        q, k, v = random_qkv(1, 8, 4)
        counter = OpCounter()
        linformer_l1_forward(AttentionSpec(ScoreKind.L1, 1.0, 4), random_projection(Rng(1), 2, 8), q, k, v, counter)
        self.assertEqual(counter.tally, score_op_counts(ScoreKind.L1, 8, 2, 4))


if __name__ == "__main__":
    unittest.main()
