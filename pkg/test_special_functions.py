"""
Tests for the Gamma and Bessel evaluators and the Neumann root search.
"""

import math
import os
import sys
import time
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from special_functions import bessel_j, bessel_series_scaled, gamma, log_gamma, neumann_root

# First zero of J_1' (published tables)
J1_PRIME_ZERO = 1.8411837813406593


class TestGamma(unittest.TestCase):
    """Lanczos Gamma against known values and math.lgamma."""

    def test_integers(self):
        """Gamma(n) = (n-1)!"""
        for n in range(1, 15):
            self.assertAlmostEqual(gamma(n) / math.factorial(n - 1), 1.0, delta=1e-13)

    def test_half(self):
        self.assertAlmostEqual(gamma(0.5), math.sqrt(math.pi), delta=1e-13)

    def test_log_gamma_matches_lgamma(self):
        for x in (0.1, 0.5, 1.7, 12.3, 99.0, 150.5):
            self.assertAlmostEqual(log_gamma(x), math.lgamma(x), delta=1e-12 * max(1.0, abs(math.lgamma(x))))

    def test_large_argument_uses_log_form(self):
        self.assertAlmostEqual(math.log(gamma(130.0)), math.lgamma(130.0), delta=1e-10 * math.lgamma(130.0))

    def test_nonpositive_rejected(self):
        with self.assertRaises(ValueError):
            gamma(0.0)
        with self.assertRaises(ValueError):
            log_gamma(-1.0)


class TestBessel(unittest.TestCase):
    """Bessel functions of the first kind."""

    def test_j0_at_zero(self):
        self.assertEqual(bessel_j(0.0, 0.0), 1.0)
        self.assertEqual(bessel_j(2.5, 0.0), 0.0)

    def test_j1_at_one(self):
        self.assertAlmostEqual(bessel_j(1.0, 1.0), 0.4400505857449335, delta=1e-12)

    def test_half_order_closed_form(self):
        """J_{1/2}(u) = sqrt(2/(pi u)) sin u"""
        for u in (0.3, 2.0, 7.5, 11.0):
            expected = math.sqrt(2.0 / (math.pi * u)) * math.sin(u)
            self.assertAlmostEqual(bessel_j(0.5, u), expected, delta=1e-12)

    def test_recurrence_residual(self):
        """J_{v-1} + J_{v+1} - (2v/u) J_v = 0 for random (v, u)"""
        rng = np.random.default_rng(7)
        for _ in range(50):
            nu = float(rng.uniform(1.0, 10.0))
            u = float(rng.uniform(0.5, 30.0))
            residual = bessel_j(nu - 1.0, u) + bessel_j(nu + 1.0, u) - 2.0 * nu / u * bessel_j(nu, u)
            self.assertLess(abs(residual), 1e-11, f"nu={nu}, u={u}")

    def test_miller_branch_matches_series(self):
        """Both evaluation schemes agree around the switch-over point"""
        for nu in (0.0, 1.0, 2.5):
            series = bessel_j(nu, 12.0)
            above = bessel_j(nu, 12.0 + 1e-9)
            self.assertAlmostEqual(series, above, delta=1e-9)

    def test_scaled_series_at_zero(self):
        self.assertEqual(bessel_series_scaled(3.0, 0.0), 1.0)

    def test_negative_order_rejected(self):
        with self.assertRaises(ValueError):
            bessel_j(-1.0, 1.0)


class TestNeumannRoot(unittest.TestCase):
    """First zero of d/du[u^(1-nu) J_nu(u)]."""

    def test_disk_root_is_j1_prime_zero(self):
        self.assertAlmostEqual(neumann_root(1.0), J1_PRIME_ZERO, delta=1e-10)

    def test_three_ball_root(self):
        """d = 3: tan u = 2u / (2 - u^2), first root about 2.0816"""
        p = neumann_root(1.5)
        self.assertAlmostEqual(math.tan(p), 2.0 * p / (2.0 - p * p), delta=1e-9)
        self.assertAlmostEqual(p, 2.0816, delta=1e-4)

    def test_strictly_increasing_in_dimension(self):
        roots = [neumann_root(d / 2.0) for d in range(2, 101)]
        for a, b in zip(roots, roots[1:]):
            self.assertLess(a, b)

    def test_runtime(self):
        start = time.perf_counter()
        neumann_root(1.0)
        neumann_root(1.5)
        self.assertLess(time.perf_counter() - start, 0.02)


if __name__ == '__main__':
    unittest.main(verbosity=2)
