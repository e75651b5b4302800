"""
Tests for the command-line front end: exit codes, report files and the
summary table.
"""

import contextlib
import io
import json
import math
import os
import sys
import tempfile
import unittest

import numpy as np
import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import cli
from bounds import exact_ball_gap


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def path(self, name):
        return os.path.join(self.tmpdir.name, name)

    def run_cli(self, *argv, out='report.json'):
        """Run the CLI; returns (exit code, parsed report or None, stdout)."""
        args = ['--log-level', 'ERROR'] + list(argv)
        if out:
            args += ['--out', self.path(out)]
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            code = cli.main(args)
        report = None
        if out and os.path.exists(self.path(out)):
            with open(self.path(out), 'r', encoding='utf-8') as f:
                report = json.load(f)
        return code, report, stdout.getvalue()

    def write_json(self, name, payload):
        with open(self.path(name), 'w', encoding='utf-8') as f:
            json.dump(payload, f)
        return self.path(name)


class TestBoundCommand(CliTestCase):
    """cli.py bound"""

    def test_uniform_ball(self):
        code, report, stdout = self.run_cli('bound', '--body', 'ball', '--radius', '1', '--dim', '4',
                                            '--potential', 'uniform')
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(report['best']['method'], 'exact_ball_gap')
        self.assertAlmostEqual(report['best']['value'], exact_ball_gap(4, 1.0).value, delta=1e-12)
        self.assertIn('exact_ball_gap', stdout)
        methods = [r['method'] for r in report['reports']]
        self.assertIn('optimal_radial_weight', methods)
        self.assertIn('payne_weinberger', methods)

    def test_uniform_box(self):
        code, report, _ = self.run_cli('bound', '--body', 'box', '--half-width', '1', '--dim', '6')
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(report['best']['method'], 'exact_box_gap')
        self.assertAlmostEqual(report['best']['value'], math.pi ** 2 / 4.0, delta=1e-12)

    def test_gaussian_complement(self):
        code, report, _ = self.run_cli('bound', '--body', 'ball_complement', '--radius', '1', '--dim', '10',
                                       '--potential', 'gaussian')
        self.assertEqual(code, cli.EXIT_OK)
        methods = {r['method']: r for r in report['reports']}
        self.assertIn('bcgm', methods)
        self.assertTrue(methods['gaussian_complement']['assumptions_ok'])

    def test_reports_are_reproducible(self):
        argv = ('bound', '--body', 'lp_ball', '--p', '3', '--radius', '1', '--dim', '3')
        self.run_cli(*argv, out='first.json')
        self.run_cli(*argv, out='second.json')
        with open(self.path('first.json'), 'rb') as a, open(self.path('second.json'), 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_spec_file(self):
        spec = self.write_json('problem.json', {'body': {'kind': 'ball', 'radius': 2, 'dim': 3},
                                                'potential': {'kind': 'uniform'}})
        code, report, _ = self.run_cli('bound', '--spec', spec, '--dim', '5')
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(report['descriptor']['body']['dim'], 5)
        self.assertAlmostEqual(report['best']['value'], exact_ball_gap(5, 2.0).value, delta=1e-12)


class TestInputErrors(CliTestCase):
    """Exit code 2 for bad input"""

    def test_malformed_potential_json(self):
        code, report, _ = self.run_cli('bound', '--body', 'ball', '--radius', '1', '--dim', '3',
                                       '--potential', '{"kind": ')
        self.assertEqual(code, cli.EXIT_INPUT)
        self.assertIsNone(report)

    def test_missing_spec_file(self):
        code, _, _ = self.run_cli('bound', '--spec', self.path('missing.json'))
        self.assertEqual(code, cli.EXIT_INPUT)

    def test_invalid_descriptor(self):
        code, _, _ = self.run_cli('bound', '--body', 'ball', '--radius', '-1', '--dim', '3')
        self.assertEqual(code, cli.EXIT_INPUT)

    def test_unknown_body_choice(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                cli.main(['bound', '--body', 'torus'])
        self.assertEqual(ctx.exception.code, 2)

    def test_certify_needs_weight(self):
        code, _, _ = self.run_cli('certify', '--body', 'ball', '--radius', '1', '--dim', '3')
        self.assertEqual(code, cli.EXIT_INPUT)

    def test_sweep_range(self):
        code, _, _ = self.run_cli('sweep-ball', '--d-min', '5', '--d-max', '3', out=None)
        self.assertEqual(code, cli.EXIT_INPUT)


class TestValidateCommand(CliTestCase):
    """cli.py validate"""

    def test_unit_ball(self):
        code, report, stdout = self.run_cli('validate', '--body', 'ball', '--radius', '1', '--dim', '3')
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(report['status'], 'ok')
        self.assertTrue(all(check['ok'] for check in report['sandwich']))
        self.assertTrue(report['sector_check']['consistent'])
        self.assertIn('radial_gap', [ref['name'] for ref in report['references']])
        self.assertIn('✓ sandwich ok', stdout)

    def test_inflated_lower_bounds_are_caught(self):
        code, report, _ = self.run_cli('validate', '--body', 'ball', '--radius', '1', '--dim', '3',
                                       '--inflate-lower', '1.1')
        self.assertEqual(code, cli.EXIT_VIOLATION)
        self.assertEqual(report['status'], 'violation')
        self.assertFalse(all(check['ok'] for check in report['sandwich']))

    def test_gaussian_complement(self):
        code, report, _ = self.run_cli('validate', '--body', 'ball_complement', '--radius', '1',
                                       '--dim', '10', '--potential', 'gaussian', '--sturm-n', '2000')
        self.assertEqual(code, cli.EXIT_OK)
        refs = {ref['name']: ref for ref in report['references']}
        self.assertEqual(refs['radial_gap']['kind'], 'numeric')
        self.assertIn(report['radial_gap']['sector'], ('l0', 'l1'))
        self.assertEqual(report['sector_check']['domain'], 'annulus')
        self.assertTrue(report['sector_check']['consistent'])

    def test_box_uses_product_gap(self):
        code, report, _ = self.run_cli('validate', '--body', 'box', '--half-width', '1', '--dim', '3',
                                       '--sturm-n', '2000')
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn('product_gap', [ref['name'] for ref in report['references']])

    def test_sweep(self):
        code, report, stdout = self.run_cli('sweep-ball', '--d-min', '2', '--d-max', '3', '--sturm-n', '2000')
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual([r['dim'] for r in report['results']], [2, 3])
        self.assertIn('✓ d=2: ok', stdout)


class TestCertifyCommand(CliTestCase):
    """cli.py certify"""

    def test_quadratic_weight(self):
        code, report, _ = self.run_cli('certify', '--body', 'ball', '--radius', '1', '--dim', '4',
                                       '--weight', '{"kind": "radial_poly", "coeffs": [3, 0, -1]}')
        self.assertEqual(code, cli.EXIT_OK)
        (entry,) = report['reports']
        self.assertEqual(entry['method'], 'certificate[radial_poly]')
        self.assertAlmostEqual(entry['value'], 8.0 / 3.0, delta=1e-6)

    def test_failing_boundary_condition(self):
        code, report, _ = self.run_cli('certify', '--body', 'ball', '--radius', '1', '--dim', '4',
                                       '--weight', '{"kind": "radial_poly", "coeffs": [2, 0, -1]}')
        self.assertEqual(code, cli.EXIT_INAPPLICABLE)
        self.assertFalse(report['reports'][0]['assumptions_ok'])


class TestGsaCommand(CliTestCase):
    """cli.py gsa"""

    def write_samples(self, n=2000):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1.0, 1.0, size=(n, 3))
        frame = pd.DataFrame({'x1': x[:, 0], 'x2': x[:, 1], 'x3': x[:, 2], 'f': x[:, 0],
                              'g1': 1.0, 'g2': 0.0, 'g3': 0.0})
        frame.to_csv(self.path('samples.csv'), index=False)
        return self.path('samples.csv')

    def test_domain_scope(self):
        code, report, stdout = self.run_cli('gsa', '--body', 'box', '--half-width', '1', '--dim', '3',
                                            '--samples', self.write_samples())
        self.assertEqual(code, cli.EXIT_OK)
        gsa = report['gsa']
        self.assertEqual(gsa['lambda_used'][0]['method'], 'exact_box_gap')
        self.assertAlmostEqual(gsa['sobol_upper'][0], 12.0 / math.pi ** 2, delta=0.1)
        self.assertEqual(gsa['sobol_upper'][1:], [0.0, 0.0])
        self.assertIn('x1', stdout)

    def test_per_input_scope(self):
        code, report, _ = self.run_cli('gsa', '--body', 'box', '--half-width', '1', '--dim', '3',
                                       '--samples', self.write_samples(), '--lambda-scope', 'per_input')
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(report['gsa']['lambda_scope'], 'per_input')
        self.assertEqual(len(report['gsa']['lambda_used']), 3)

    def test_samples_outside_body(self):
        code, _, _ = self.run_cli('gsa', '--body', 'box', '--half-width', '0.5', '--dim', '3',
                                  '--samples', self.write_samples())
        self.assertEqual(code, cli.EXIT_INPUT)


class TestCorpus(unittest.TestCase):
    """Known gaps from test_corpus.json"""

    @classmethod
    def setUpClass(cls):
        corpus_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'test_corpus.json')
        with open(corpus_path, 'r', encoding='utf-8') as f:
            cls.corpus = json.load(f)

    def test_known_gaps(self):
        for case in self.corpus['test_cases']:
            descriptor, body, pot = cli.load_problem(case['descriptor'])
            payload, code = cli.cmd_bound(descriptor, body, pot)
            expected = case['expected_best']
            self.assertEqual(code, cli.EXIT_OK, case['notes'])
            self.assertEqual(payload['best']['method'], expected['method'], case['notes'])
            self.assertAlmostEqual(payload['best']['value'] / expected['value'], 1.0,
                                   delta=expected['rel_tol'], msg=case['notes'])

    def test_edge_cases(self):
        for case in self.corpus['edge_cases']:
            if case['expected_result'] == 'error':
                with self.assertRaises(cli.InputError, msg=case['notes']):
                    cli.load_problem(case['descriptor'])
            else:
                descriptor, body, pot = cli.load_problem(case['descriptor'])
                payload, code = cli.cmd_bound(descriptor, body, pot)
                self.assertEqual(code, cli.EXIT_INAPPLICABLE, case['notes'])
                self.assertIsNone(payload['best'])


class TestOutput(CliTestCase):
    """Report file and table formatting"""

    def test_table_values_round_trip(self):
        _, report, _ = self.run_cli('bound', '--body', 'lp_ball', '--p', '4', '--radius', '1', '--dim', '2')
        table = cli.format_table(report['reports'])
        for r in report['reports']:
            if isinstance(r['value'], float):
                self.assertIn('%.17g' % r['value'], table)
                self.assertEqual(float('%.17g' % r['value']), r['value'])

    def test_empty_table(self):
        self.assertEqual(cli.format_table([]), '(no reports)')

    def test_atomic_write_leaves_no_temporaries(self):
        cli.write_report({'command': 'bound', 'value': 1.5}, self.path('out.json'))
        self.assertEqual(os.listdir(self.tmpdir.name), ['out.json'])
        with open(self.path('out.json'), 'r', encoding='utf-8') as f:
            self.assertEqual(json.load(f)['value'], 1.5)


if __name__ == '__main__':
    unittest.main(verbosity=2)
