"""
Unit tests for the per-dimension kernels and their crossing point.
"""

import math
import unittest

import numpy as np

from ecoattn.attention import (
    ROBUST_L1_LAMBDA,
    ScoreKind,
    gaussian_inflection_check,
    kernel_crossing_lambda,
    kernel_crossing_point,
    kernel_curves,
    kernel_weight,
    squared_l2_weight,
)
from ecoattn.exceptions import ParameterError


class TestKernelWeight(unittest.TestCase):
    """Test cases for kernel_weight."""

    def test_zero_distance(self):
        for kind in ScoreKind:
            self.assertEqual(kernel_weight(kind, 2.0, 16, 0.0), 1.0)

    def test_gaussian_at_inflection(self):
        """d^2 / (2 sqrt(16)) = 1/2 at d = 2."""
        self.assertAlmostEqual(kernel_weight(ScoreKind.DOT_PRODUCT, 0.0, 16, 2.0), math.exp(-0.5), places=14)
        self.assertAlmostEqual(kernel_weight(ScoreKind.L1, 1.0, 16, 2.0), 0.60653, places=5)

    def test_squared_l2_is_gaussian(self):
        """Squared-L2 takes the Gaussian branch whatever lambda is."""
        self.assertAlmostEqual(kernel_weight(ScoreKind.SQUARED_L2, 1.0, 16, 2.0), math.exp(-0.5), places=14)
        d = np.linspace(0, 5, 11)
        np.testing.assert_allclose(
            kernel_weight(ScoreKind.SQUARED_L2, 3.0, 9, d),
            kernel_weight(ScoreKind.DOT_PRODUCT, 0.0, 9, d),
            atol=1e-15,
        )

    def test_squared_l2_bandwidth(self):
        """exp(-lam d^2 / sqrt(Dk)); lam = 1/2 recovers the Gaussian."""
        self.assertAlmostEqual(squared_l2_weight(1.0, 16, 2.0), math.exp(-1.0), places=14)
        d = np.linspace(0, 5, 11)
        np.testing.assert_allclose(
            squared_l2_weight(0.5, 9, d),
            kernel_weight(ScoreKind.DOT_PRODUCT, 0.0, 9, d),
            atol=1e-15,
        )
        with self.assertRaises(ParameterError):
            squared_l2_weight(-1.0, 9, 1.0)

    def test_monotone_decreasing(self):
        d = np.linspace(0, 8, 50)
        for kind in ScoreKind:
            weights = kernel_weight(kind, 1.0, 4, d)
            self.assertTrue(np.all(np.diff(weights) < 0), msg=kind.value)

    def test_laplacian_has_heavier_tail(self):
        """Past the crossing the Laplacian decays slower than the Gaussian."""
        for d_k in (4, 16, 64):
            lam, d_star = kernel_crossing_point(d_k)
            far = 3.0 * d_star
            self.assertGreater(kernel_weight(ScoreKind.L1, lam, d_k, far),
                               kernel_weight(ScoreKind.DOT_PRODUCT, 0.0, d_k, far))

    def test_bad_dimension(self):
        with self.assertRaises(ParameterError):
            kernel_weight(ScoreKind.L1, 1.0, 0, 1.0)


class TestCrossing(unittest.TestCase):
    """The Laplacian meets the Gaussian at its inflection point."""

    def test_crossing_lambda_examples(self):
        self.assertAlmostEqual(kernel_crossing_lambda(16), 1.0, places=15)
        self.assertAlmostEqual(kernel_crossing_lambda(1), 0.5, places=15)
        self.assertAlmostEqual(kernel_crossing_lambda(64), 1.41421, places=5)
        self.assertEqual(kernel_crossing_point(16), (1.0, 2.0))

    def test_weights_agree_at_crossing(self):
        for d_k in (1, 4, 16, 64, 256):
            lam, d_star = kernel_crossing_point(d_k)
            gaussian = kernel_weight(ScoreKind.DOT_PRODUCT, 0.0, d_k, d_star)
            laplacian = kernel_weight(ScoreKind.L1, lam, d_k, d_star)
            self.assertLess(abs(gaussian - laplacian), 1e-12, msg=f"d_k={d_k}")

    def test_gaussian_inflection(self):
        """The second derivative changes sign across Dk^(1/4)."""
        for d_k in (1, 4, 16, 64, 256):
            below, above = gaussian_inflection_check(d_k)
            self.assertLess(below, 0.0, msg=f"d_k={d_k}")
            self.assertGreater(above, 0.0, msg=f"d_k={d_k}")

    def test_robust_lambda(self):
        self.assertEqual(ROBUST_L1_LAMBDA, 3.0)


class TestKernelCurves(unittest.TestCase):
    """Test cases for the kernel curve table."""

    def test_columns_and_origin(self):
        frame = kernel_curves(16, [1.0, 3.0], 6.0, 61)
        self.assertEqual(list(frame.columns), ["d", "gaussian", "laplacian_lambda_1", "laplacian_lambda_3"])
        self.assertEqual(len(frame), 61)
        self.assertEqual(frame.loc[0, "gaussian"], 1.0)
        self.assertEqual(frame.loc[0, "laplacian_lambda_1"], 1.0)
        self.assertEqual(frame["d"].iloc[-1], 6.0)

    def test_bad_arguments(self):
        with self.assertRaises(ParameterError):
            kernel_curves(16, [1.0], 6.0, 1)
        with self.assertRaises(ParameterError):
            kernel_curves(16, [1.0], 0.0, 10)
        with self.assertRaises(ParameterError):
            kernel_curves(16, [-1.0], 6.0, 10)


if __name__ == "__main__":
    unittest.main()
