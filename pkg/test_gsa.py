"""
Tests for the derivative-based Sobol upper bounds.
"""

import math
import os
import sys
import tempfile
import unittest

import numpy as np
import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from bounds import exact_box_gap, payne_weinberger
from geometry import Ball, Box, GaussianFn, ZeroFn
from gsa import (SampleFile, SampleSet, SampleTotals, accumulate, estimate_dgsm, per_input_bounds,
                 sobol_upper_bound)
from measures import Product, RadialPower, Uniform
from reports import inapplicable


def linear_samples(n=100000, seed=0, coeffs=(1.0, 0.0, 0.0)):
    """f(x) = c . x for x uniform on [-1, 1]^d."""
    rng = np.random.default_rng(seed)
    coeffs = np.asarray(coeffs, dtype=float)
    x = rng.uniform(-1.0, 1.0, size=(n, coeffs.size))
    grad = np.broadcast_to(coeffs, x.shape)
    return SampleSet.from_arrays(x, x @ coeffs, grad, body=Box(1.0, coeffs.size))


class TestSobolUpperBound(unittest.TestCase):
    """S_i^upper = nu_i / (lambda Var f)."""

    def test_first_coordinate_on_cube(self):
        samples = linear_samples()
        report = sobol_upper_bound(samples, exact_box_gap(1.0))
        self.assertGreaterEqual(report.sobol_upper[0], 1.19)
        self.assertLessEqual(report.sobol_upper[0], 1.24)
        self.assertGreaterEqual(report.sobol_upper[0], 1.0)
        self.assertEqual(report.sobol_upper[1:], [0.0, 0.0])
        self.assertEqual(report.lambda_scope, 'domain')

    def test_weaker_gap_bound_is_looser(self):
        samples = linear_samples()
        tight = sobol_upper_bound(samples, exact_box_gap(1.0)).sobol_upper[0]
        pw = payne_weinberger(Box(1.0, 3), Uniform())
        loose = sobol_upper_bound(samples, pw).sobol_upper[0]
        self.assertGreater(loose, tight)
        self.assertAlmostEqual(loose / tight, 3.0, delta=1e-9)
        self.assertAlmostEqual(loose, 36.0 / math.pi ** 2, delta=0.1)

    def test_uninformative_entries_are_flagged(self):
        samples = linear_samples(n=2000)
        report = sobol_upper_bound(samples, payne_weinberger(Box(1.0, 3), Uniform()))
        self.assertEqual(report.uninformative, [True, False, False])
        self.assertTrue(report.notes)

    def test_dgsm_is_exact_for_linear_functions(self):
        samples = linear_samples(n=500, coeffs=(2.0, 3.0))
        est = estimate_dgsm(samples)
        np.testing.assert_allclose(est.dgsm, [4.0, 9.0])
        np.testing.assert_allclose(est.dgsm_se, [0.0, 0.0], atol=1e-12)
        self.assertGreater(est.variance_se, 0.0)

    def test_constant_function_rejected(self):
        x = np.zeros((10, 2))
        samples = SampleSet.from_arrays(x, np.ones(10), np.zeros((10, 2)))
        with self.assertRaises(ValueError):
            sobol_upper_bound(samples, exact_box_gap(1.0))

    def test_uncertified_lambda_rejected(self):
        samples = linear_samples(n=100)
        with self.assertRaises(ValueError):
            sobol_upper_bound(samples, inapplicable('orlicz', 'not an Orlicz body'))

    def test_per_input_lambda(self):
        samples = linear_samples(n=1000)
        bounds = per_input_bounds(Uniform(), Box(1.0, 3))
        report = sobol_upper_bound(samples, bounds)
        self.assertEqual(report.lambda_scope, 'per_input')
        domain = sobol_upper_bound(samples, exact_box_gap(1.0))
        np.testing.assert_allclose(report.sobol_upper, domain.sobol_upper, rtol=1e-12)
        with self.assertRaises(ValueError):
            sobol_upper_bound(samples, bounds[:2])

    def test_report_serializes(self):
        report = sobol_upper_bound(linear_samples(n=1000), exact_box_gap(1.0)).to_dict()
        for key in ('variance_hat', 'dgsm', 'sobol_upper', 'sobol_upper_se', 'uninformative', 'lambda_used', 'n'):
            self.assertIn(key, report)
        self.assertEqual(report['lambda_used'][0]['method'], 'exact_box_gap')


class TestPerInputBounds(unittest.TestCase):
    """One-dimensional gaps of independent inputs."""

    def test_uniform_inputs(self):
        reports = per_input_bounds(Uniform(), Box(1.0, 3))
        self.assertEqual([r.method for r in reports], ['payne_weinberger_1d'] * 3)
        for r in reports:
            self.assertAlmostEqual(r.value, math.pi ** 2 / 4.0)

    def test_stiff_gaussian_input(self):
        reports = per_input_bounds(Product([GaussianFn(0.5), ZeroFn()]), Box(1.0, 2))
        self.assertEqual(reports[0].method, 'brascamp_lieb_1d')
        self.assertAlmostEqual(reports[0].value, 4.0)
        self.assertEqual(reports[1].method, 'payne_weinberger_1d')
        self.assertEqual(reports[1].diagnostics['input'], 2.0)

    def test_rejections(self):
        with self.assertRaises(ValueError):
            per_input_bounds(Uniform(), Ball(1.0, 2))
        with self.assertRaises(ValueError):
            per_input_bounds(RadialPower(2.0), Box(1.0, 2))


class TestSampleFile(unittest.TestCase):
    """CSV sample files read chunk by chunk."""

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def write(self, frame, name='samples.csv'):
        path = os.path.join(self.tmpdir.name, name)
        frame.to_csv(path, index=False, encoding='utf-8')
        return path

    def product_frame(self, n=250, seed=4):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-1.0, 1.0, size=(n, 2))
        frame = pd.DataFrame({'x1': x[:, 0], 'x2': x[:, 1], 'f': x[:, 0] * x[:, 1] + x[:, 0],
                              'g1': x[:, 1] + 1.0, 'g2': x[:, 0]})
        return frame, x

    def test_chunks(self):
        frame, x = self.product_frame()
        samples = SampleFile(self.write(frame), body=Box(1.0, 2), chunksize=100)
        self.assertEqual(samples.n, 250)
        self.assertEqual(samples.dim, 2)
        chunks = list(samples.chunks())
        self.assertEqual([c.n for c in chunks], [100, 100, 50])
        np.testing.assert_allclose(np.concatenate([c.f for c in chunks]), x[:, 0] * x[:, 1] + x[:, 0])
        np.testing.assert_allclose(chunks[0].grad[:, 1], x[:100, 0])

    def test_file_matches_memory(self):
        """Chunked totals and jackknife errors agree with the in-memory estimate"""
        frame, x = self.product_frame(n=1000)
        path = self.write(frame)
        in_memory = SampleSet.from_arrays(x, frame['f'].to_numpy(), frame[['g1', 'g2']].to_numpy())
        expected = sobol_upper_bound(in_memory, exact_box_gap(1.0))
        for chunksize in (37, 1000, 5000):
            report = sobol_upper_bound(SampleFile(path, chunksize=chunksize), exact_box_gap(1.0))
            self.assertEqual(report.n, 1000)
            self.assertAlmostEqual(report.variance_hat, expected.variance_hat, delta=1e-12)
            self.assertAlmostEqual(report.variance_se, expected.variance_se, delta=1e-10)
            np.testing.assert_allclose(report.dgsm, expected.dgsm, rtol=1e-12)
            np.testing.assert_allclose(report.dgsm_se, expected.dgsm_se, rtol=1e-6, atol=1e-12)
            np.testing.assert_allclose(report.sobol_upper, expected.sobol_upper, rtol=1e-12)
            np.testing.assert_allclose(report.sobol_upper_se, expected.sobol_upper_se, rtol=1e-6)
            self.assertEqual(report.provenance, path)

    def test_totals_merge(self):
        samples = linear_samples(n=300, coeffs=(1.0, 2.0))
        halves = [SampleSet(samples.x[:120], samples.f[:120], samples.grad[:120]),
                  SampleSet(samples.x[120:], samples.f[120:], samples.grad[120:])]
        merged = accumulate(halves)
        whole = SampleTotals.of(samples)
        self.assertEqual(merged.n, 300)
        self.assertAlmostEqual(merged.mean, whole.mean, delta=1e-14)
        self.assertAlmostEqual(merged.variance, float(np.var(samples.f, ddof=1)), delta=1e-12)
        np.testing.assert_allclose(merged.dgsm, [1.0, 4.0])

    def test_outside_rows_are_counted_over_the_file(self):
        """One stray row in 2000 is tolerated even when its chunk has 100 rows"""
        frame, _ = self.product_frame(n=2000)
        frame.loc[5, 'x1'] = 3.0
        samples = SampleFile(self.write(frame), body=Box(1.0, 2), chunksize=100)
        self.assertEqual(samples.n, 1999)
        self.assertEqual(samples.totals.rejected, 1)

    def test_bad_header(self):
        frame = pd.DataFrame({'x1': [0.1], 'y': [0.2], 'g1': [1.0]})
        with self.assertRaises(ValueError):
            SampleFile(self.write(frame))

    def test_rows_outside_body(self):
        frame = pd.DataFrame({'x1': [0.1, 3.0], 'x2': [0.0, 0.0], 'f': [0.0, 1.0],
                              'g1': [1.0, 1.0], 'g2': [0.0, 0.0]})
        with self.assertRaises(ValueError):
            SampleFile(self.write(frame), body=Box(1.0, 2))

    def test_inconsistent_shapes(self):
        with self.assertRaises(ValueError):
            SampleSet.from_arrays(np.zeros((3, 2)), np.zeros(2), np.zeros((3, 2)))

    def test_non_finite_values(self):
        with self.assertRaises(ValueError):
            SampleSet.from_arrays(np.zeros((2, 1)), [0.0, math.nan], np.zeros((2, 1)))


if __name__ == '__main__':
    unittest.main(verbosity=2)
