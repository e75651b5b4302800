"""
Tests for potentials, Hessian eigenvalues, the Brascamp-Lieb bound and the
radial moments.
"""

import math
import os
import sys
import unittest

import numpy as np
from scipy.integrate import trapezoid

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from geometry import Ball, BallComplement, Box, GaussianFn, LpBall, PowerFn, ZeroFn
from measures import (Product, RadialCustom, RadialPower, Uniform, brascamp_lieb_bound, hessian_eigs,
                      moment_ratio, potential_from_json, radial_density_moment, radial_log_moment,
                      radial_range)


class TestHessianEigs(unittest.TestCase):
    """(V''(r), V'(r)/r) for radial potentials."""

    def test_gaussian(self):
        self.assertEqual(hessian_eigs(RadialPower(2.0), 3.7), (1.0, 1.0))
        self.assertEqual(hessian_eigs(RadialPower(2.0), 0.0), (1.0, 1.0))

    def test_subbotin(self):
        eigs = hessian_eigs(RadialPower(1.5), 4.0)
        self.assertAlmostEqual(eigs.radial_eig, 0.25)
        self.assertAlmostEqual(eigs.tangential_eig, 0.5)

    def test_uniform(self):
        self.assertEqual(hessian_eigs(Uniform(), 0.0), (0.0, 0.0))
        self.assertEqual(hessian_eigs(Uniform(), 2.0), (0.0, 0.0))

    def test_origin_diverges_below_two(self):
        with self.assertRaises(ValueError):
            hessian_eigs(RadialPower(1.5), 0.0)

    def test_negative_radius(self):
        with self.assertRaises(ValueError):
            hessian_eigs(RadialPower(2.0), -1.0)

    def test_product_is_not_radial(self):
        with self.assertRaises(ValueError):
            hessian_eigs(Product([GaussianFn()] * 2), 1.0)

    def test_finite_difference(self):
        """Eigenvalues of a finite-difference Hessian of V(x) = |x|^alpha / alpha"""
        pot = RadialPower(3.0)
        x = np.array([0.6, -0.8, 0.5])
        h = 1e-4
        d = x.size
        hess = np.zeros((d, d))
        for i in range(d):
            for j in range(d):
                ei, ej = h * np.eye(d)[i], h * np.eye(d)[j]
                hess[i, j] = (pot.value(x + ei + ej) - pot.value(x + ei - ej)
                              - pot.value(x - ei + ej) + pot.value(x - ei - ej))[0] / (4 * h * h)
        fd = np.linalg.eigvalsh(hess)
        eigs = hessian_eigs(pot, float(np.linalg.norm(x)))
        np.testing.assert_allclose(fd, sorted([eigs.tangential_eig, eigs.tangential_eig, eigs.radial_eig]),
                                   rtol=1e-5)

    def test_smallest_eigenvalue_identity(self):
        """min of the two eigenvalues is min(1, alpha - 1) r^(alpha - 2)"""
        for alpha in (1.3, 2.0, 2.5, 4.0):
            for r in (0.1, 1.0, 3.0):
                eigs = hessian_eigs(RadialPower(alpha), r)
                expected = min(1.0, alpha - 1.0) * r ** (alpha - 2.0)
                self.assertAlmostEqual(min(eigs), expected, delta=1e-12 * max(1.0, expected))


class TestBrascampLieb(unittest.TestCase):
    """inf of the smallest Hessian eigenvalue over the body."""

    def test_gaussian_on_ball(self):
        self.assertEqual(brascamp_lieb_bound(RadialPower(2.0), Ball(3.0, 5)).value, 1.0)

    def test_subbotin_on_ball(self):
        report = brascamp_lieb_bound(RadialPower(1.5), Ball(4.0, 3))
        self.assertAlmostEqual(report.value, 0.25)
        self.assertTrue(report.certifies_lower)

    def test_uniform_is_inapplicable(self):
        report = brascamp_lieb_bound(Uniform(), Ball(1.0, 2))
        self.assertFalse(report.assumptions_ok)
        self.assertFalse(report.certifies_lower)

    def test_monotone_in_radius(self):
        values = [brascamp_lieb_bound(RadialPower(1.5), Ball(r, 3)).value for r in (0.5, 1.0, 2.0, 4.0)]
        for a, b in zip(values, values[1:]):
            self.assertGreater(a, b)

    def test_product_on_box(self):
        report = brascamp_lieb_bound(Product([GaussianFn(1.0), GaussianFn(0.5)]), Box(2.0, 2))
        self.assertAlmostEqual(report.value, 1.0)

    def test_product_with_flat_factor(self):
        report = brascamp_lieb_bound(Product([GaussianFn(), ZeroFn()]), Box(1.0, 2))
        self.assertFalse(report.assumptions_ok)

    def test_ball_complement_is_inapplicable(self):
        self.assertFalse(brascamp_lieb_bound(RadialPower(2.0), BallComplement(1.0, 4)).assumptions_ok)

    def test_steep_power_on_lp_ball(self):
        """alpha > 2: V''(r) and V'(r)/r vanish at the origin"""
        report = brascamp_lieb_bound(RadialPower(3.0), LpBall(3.0, 1.0, 2))
        self.assertFalse(report.assumptions_ok)
        self.assertEqual(report.diagnostics['argmin_r'], 0.0)

    def test_steep_power_is_inapplicable_on_every_ball(self):
        for alpha in (2.5, 3.0, 6.0):
            for r in (0.25, 1.0, 4.0):
                report = brascamp_lieb_bound(RadialPower(alpha), Ball(r, 3))
                self.assertFalse(report.assumptions_ok)
                self.assertEqual(report.value, 0.0)

    def test_nested_balls_alpha_at_least_two(self):
        """Shrinking the ball does not move the infimum, which sits at the origin"""
        for alpha in (2.0, 3.0, 4.0):
            values = [brascamp_lieb_bound(RadialPower(alpha), Ball(r, 4)).value for r in (0.1, 0.5, 1.0, 3.0)]
            self.assertEqual(len(set(values)), 1)

    def test_custom_potential_uses_origin_limit(self):
        v = lambda r: 0.5 * r ** 2 + 0.25 * r ** 4
        dv = lambda r: r + r ** 3
        d2v = lambda r: 1.0 + 3.0 * r ** 2
        report = brascamp_lieb_bound(RadialCustom(v, dv, d2v, origin_limit=1.0), Ball(2.0, 3))
        self.assertTrue(report.certifies_lower)
        self.assertEqual(report.value, 1.0)
        self.assertEqual(report.diagnostics['argmin_r'], 0.0)

    def test_custom_potential_without_origin_limit(self):
        pot = RadialCustom(lambda r: r ** 2, lambda r: 2.0 * r, lambda r: 2.0 + 0.0 * r)
        self.assertFalse(brascamp_lieb_bound(pot, Ball(1.0, 2)).assumptions_ok)


class TestMoments(unittest.TestCase):
    """Radial moments of r^(d-1) exp(-v(r))."""

    def test_uniform_ball(self):
        self.assertAlmostEqual(radial_density_moment(Uniform(), Ball(1.0, 3), 2), 0.2, delta=1e-11)
        self.assertAlmostEqual(moment_ratio(Uniform(), Ball(1.0, 3)), 5.0, delta=1e-10)

    def test_uniform_ball_general(self):
        """d m0 / m2 = (d + 2) / R^2 for the uniform ball"""
        for d in (2, 7, 40):
            self.assertAlmostEqual(moment_ratio(Uniform(), Ball(2.0, d)), (d + 2) / 4.0, delta=1e-9 * d)

    def test_gaussian_large_ball(self):
        self.assertAlmostEqual(moment_ratio(RadialPower(2.0), Ball(40.0, 2)), 1.0, delta=1e-8)

    def test_ball_complement_against_trapezoid(self):
        body = BallComplement(3.0, 10)
        r = np.linspace(3.0, 40.0, 400001)
        density = r ** 9 * np.exp(-0.5 * r * r)
        m0 = trapezoid(density, r)
        m2 = trapezoid(r * r * density, r)
        self.assertAlmostEqual(moment_ratio(RadialPower(2.0), body, r_max=40.0) / (10 * m0 / m2), 1.0,
                               delta=1e-4)

    def test_high_dimension_does_not_overflow(self):
        value = radial_log_moment(RadialPower(2.0), Ball(30.0, 400), 2)
        self.assertTrue(math.isfinite(value))
        self.assertGreater(value, 700.0)

    def test_complement_needs_truncation(self):
        with self.assertRaises(ValueError):
            radial_range(BallComplement(1.0, 3))
        self.assertEqual(radial_range(BallComplement(1.0, 3), 5.0), (1.0, 5.0))

    def test_box_rejected(self):
        with self.assertRaises(ValueError):
            moment_ratio(Uniform(), Box(1.0, 2))

    def test_negative_order(self):
        with self.assertRaises(ValueError):
            radial_log_moment(Uniform(), Ball(1.0, 2), -1)


class TestPotentialDescriptors(unittest.TestCase):

    def test_kinds(self):
        self.assertIsInstance(potential_from_json({'kind': 'uniform'}), Uniform)
        self.assertEqual(potential_from_json({'kind': 'gaussian'}).alpha, 2.0)
        self.assertEqual(potential_from_json({'kind': 'radial_power', 'alpha': 1.5}).alpha, 1.5)

    def test_single_product_factor_is_repeated(self):
        pot = potential_from_json({'kind': 'product', 'factors': [{'form': 'gaussian'}]}, dim=4)
        self.assertEqual(pot.dim, 4)
        self.assertFalse(pot.is_uniform())

    def test_alpha_at_most_one_rejected(self):
        with self.assertRaises(ValueError):
            potential_from_json({'kind': 'radial_power', 'alpha': 1.0})

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            potential_from_json({'kind': 'cauchy'})

    def test_log_concavity(self):
        self.assertTrue(RadialPower(1.5).is_log_concave(3.0))
        concave = RadialCustom(lambda r: -r * r, lambda r: -2.0 * r, lambda r: -2.0 + 0.0 * r)
        self.assertFalse(concave.is_log_concave(1.0))
        self.assertTrue(Product([PowerFn(2.0), ZeroFn()]).is_log_concave(1.0))

    def test_product_value(self):
        pot = Product([GaussianFn(), ZeroFn()])
        np.testing.assert_allclose(pot.value(np.array([[2.0, 5.0]])), [2.0])
        with self.assertRaises(ValueError):
            pot.value(np.zeros((1, 3)))


if __name__ == '__main__':
    unittest.main(verbosity=2)
