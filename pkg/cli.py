#!/usr/bin/env python3
"""
Command-line front end for the spectral gap toolkit.

    python cli.py bound --body ball --radius 1 --dim 4 --potential uniform
    python cli.py validate --body box --half-width 1 --dim 6
    python cli.py certify --spec problem.json --weight '{"kind": "radial_poly", "coeffs": [3, 0, -1]}'
    python cli.py gsa --spec problem.json --samples samples.csv
    python cli.py sweep-ball --d-min 2 --d-max 10

Exit codes: 0 ok, 1 internal failure, 2 invalid input, 3 no applicable
bound, 4 a certified lower bound exceeds a numerical reference.
"""

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

import config
from bounds import (GridSpec, best_bound, best_certified, certify_weight, weight_from_json)
from geometry import Ball, BallComplement, Box, body_from_json
from gsa import SampleFile, per_input_bounds, sobol_upper_bound
from input_validation import validate_descriptor
from measures import Product, RadialPotential, Uniform, potential_from_json
from reports import BoundReport, json_float
from validate import (GalerkinProblem, galerkin_upper_report, product_gap, radial_gap_report,
                      sector_consistency)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_INAPPLICABLE = 3
EXIT_VIOLATION = 4

# Monte Carlo references are trusted to this many standard errors
MC_SIGMAS = 3.0


class InputError(Exception):
    """Descriptor or file problem; maps to exit code 2."""


# ============================================================================
# DESCRIPTORS
# ============================================================================

def _parse_json_arg(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"Malformed JSON in {what}: {e}")


def build_descriptor(args: argparse.Namespace) -> Dict[str, Any]:
    """Descriptor from --spec FILE, overridden by individual flags."""
    raw: Dict[str, Any] = {}
    if args.spec:
        try:
            with open(args.spec, 'r', encoding='utf-8') as f:
                raw = _parse_json_arg(f.read(), args.spec)
        except OSError as e:
            raise InputError(f"Cannot read {args.spec}: {e}")
        if not isinstance(raw, dict):
            raise InputError(f"{args.spec} must hold a JSON object")

    if args.body:
        body: Dict[str, Any] = {'kind': args.body}
        if args.radius is not None:
            body['radius'] = args.radius
        if args.half_width is not None:
            body['half_width'] = args.half_width
        if args.p is not None:
            body['p'] = args.p
        if args.dim is not None:
            body['dim'] = args.dim
        raw['body'] = body
    elif args.dim is not None and isinstance(raw.get('body'), dict):
        raw['body']['dim'] = args.dim

    if args.potential:
        if args.potential.strip().startswith('{'):
            raw['potential'] = _parse_json_arg(args.potential, '--potential')
        else:
            potential: Dict[str, Any] = {'kind': args.potential}
            if args.alpha is not None:
                potential['alpha'] = args.alpha
            raw['potential'] = potential

    weight = getattr(args, 'weight', None)
    if weight:
        raw['weight'] = (_parse_json_arg(weight, '--weight') if weight.strip().startswith('{')
                         else {'kind': weight})

    options = dict(raw.get('options', {}))
    for flag, key in (('seed', 'seed'), ('grid_n', 'grid_n'), ('degree', 'degree'),
                      ('trunc', 'trunc'), ('sturm_n', 'sturm_n'), ('inflate_lower', 'inflate_lower')):
        value = getattr(args, flag, None)
        if value is not None:
            options[key] = value
    if options:
        raw['options'] = options
    return raw


def load_problem(raw: Dict[str, Any]):
    """Validate a raw descriptor and build (descriptor, body, potential)."""
    ok, descriptor, error = validate_descriptor(raw)
    if not ok:
        raise InputError(error)
    try:
        body = body_from_json(descriptor['body'])
        pot = potential_from_json(descriptor['potential'], dim=body.dim)
    except (ValueError, KeyError) as e:
        raise InputError(str(e))
    return descriptor, body, pot


# ============================================================================
# COMMANDS
# ============================================================================

def _inflate(reports: List[BoundReport], factor: float) -> List[BoundReport]:
    if factor == 1.0:
        return reports
    logger.warning(f"Test hook: certified lower bounds inflated by a factor {factor}")
    return [replace(r, value=r.value * factor, notes=r.notes + [f"inflated x{factor} (test hook)"])
            if r.certifies_lower else r
            for r in reports]


def cmd_bound(descriptor: Dict[str, Any], body, pot) -> Tuple[Dict[str, Any], int]:
    """All applicable bounds for the problem."""
    reports = _inflate(best_bound(pot, body), descriptor['options']['inflate_lower'])
    best = best_certified(reports)
    payload = {
        'command': 'bound',
        'descriptor': descriptor,
        'reports': [r.to_dict() for r in reports],
        'best': None if best is None else {'method': best.method, 'value': json_float(best.value)},
    }
    return payload, EXIT_OK if best is not None else EXIT_INAPPLICABLE


def _references(descriptor: Dict[str, Any], body, pot) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    options = descriptor['options']
    references: List[Dict[str, Any]] = []
    extra: Dict[str, Any] = {}

    if isinstance(body, (Ball, BallComplement)) and isinstance(pot, RadialPotential):
        result = radial_gap_report(pot, body, options['sturm_n'], options.get('trunc'))
        references.append({'name': 'radial_gap', 'kind': 'numeric', 'value': result.value, 'std_error': 0.0})
        extra['radial_gap'] = {'l0': json_float(result.l0), 'l1': json_float(result.l1),
                               'sector': result.sector, 'r_max': json_float(result.r_max)}
        check = sector_consistency(pot, body, options['degree'], options.get('trunc'))
        extra['sector_check'] = {'domain': check.domain, 'galerkin': json_float(check.galerkin),
                                 'radial': json_float(check.radial), 'consistent': check.consistent}
        if check.r_max is not None:
            extra['sector_check']['r_max'] = json_float(check.r_max)
    elif isinstance(body, Box) and isinstance(pot, (Uniform, Product)):
        value = product_gap(pot, body, options['sturm_n'])
        references.append({'name': 'product_gap', 'kind': 'numeric', 'value': value, 'std_error': 0.0})
    elif body.is_bounded:
        problem = GalerkinProblem(body, pot, options['degree'], options['mc_samples'], options['seed'])
        result = galerkin_upper_report(problem)
        references.append({'name': 'galerkin_upper', 'kind': 'upper', 'value': result.value,
                           'std_error': result.std_error})
        extra['galerkin'] = {'basis_size': result.basis_size, 'kept': result.kept,
                             'moments': result.moments}
    return references, extra


def cmd_validate(descriptor: Dict[str, Any], body, pot) -> Tuple[Dict[str, Any], int]:
    """
    Check every certified lower bound against the numerical references and
    the exact or upper values among the bounds.
    """
    reports = _inflate(best_bound(pot, body), descriptor['options']['inflate_lower'])
    references, extra = _references(descriptor, body, pot)
    for r in reports:
        if r.assumptions_ok and r.kind in ('upper', 'exact'):
            references.append({'name': r.method, 'kind': r.kind, 'value': r.value, 'std_error': 0.0})

    checks = []
    violations = 0
    for lower in (r for r in reports if r.certifies_lower):
        for ref in references:
            if ref['name'] == lower.method:
                continue
            # an exact value against a discretized reference is only as good as the mesh
            tol = (config.EXACT_REL_TOL if lower.kind == 'exact' and ref['kind'] == 'numeric'
                   else config.SANDWICH_TOL)
            slack = tol * max(1.0, abs(ref['value'])) + MC_SIGMAS * ref['std_error']
            ok = lower.value <= ref['value'] + slack
            violations += not ok
            checks.append({'lower': lower.method, 'reference': ref['name'],
                           'margin': json_float(ref['value'] - lower.value), 'ok': ok})
            if not ok:
                logger.error(f"{lower.method} = {lower.value:.17g} exceeds {ref['name']} = {ref['value']:.17g}")

    consistent = extra.get('sector_check', {}).get('consistent', True)
    if violations or not consistent:
        status, code = 'violation', EXIT_VIOLATION
    elif best_certified(reports) is None:
        status, code = 'inapplicable', EXIT_INAPPLICABLE
    else:
        status, code = 'ok', EXIT_OK

    payload = {
        'command': 'validate',
        'descriptor': descriptor,
        'reports': [r.to_dict() for r in reports],
        'references': [dict(ref, value=json_float(ref['value']), std_error=json_float(ref['std_error']))
                       for ref in references],
        'sandwich': checks,
        'status': status,
    }
    payload.update(extra)
    return payload, code


def cmd_certify(descriptor: Dict[str, Any], body, pot) -> Tuple[Dict[str, Any], int]:
    """Run the weight certificate engine on the descriptor's weight."""
    if 'weight' not in descriptor:
        raise InputError("certify needs a weight (--weight or 'weight' in the descriptor)")
    try:
        weight = weight_from_json(descriptor['weight'])
        report = certify_weight(pot, body, weight, GridSpec.from_options(descriptor['options']))
    except ValueError as e:
        raise InputError(str(e))
    payload = {'command': 'certify', 'descriptor': descriptor, 'reports': [report.to_dict()]}
    return payload, EXIT_OK if report.certifies_lower else EXIT_INAPPLICABLE


def cmd_gsa(descriptor: Dict[str, Any], body, pot, samples_path: str,
            scope: str = 'domain') -> Tuple[Dict[str, Any], int]:
    """Sobol upper bounds from a sample CSV and a certified gap."""
    try:
        samples = SampleFile(samples_path, body)
    except (OSError, ValueError) as e:
        raise InputError(str(e))
    if scope == 'per_input':
        try:
            lam = per_input_bounds(pot, body)
        except ValueError as e:
            raise InputError(str(e))
    else:
        lam = best_certified(best_bound(pot, body))
        if lam is None:
            payload = {'command': 'gsa', 'descriptor': descriptor, 'error': 'no certified lower bound'}
            return payload, EXIT_INAPPLICABLE
    try:
        report = sobol_upper_bound(samples, lam)
    except ValueError as e:
        raise InputError(str(e))
    payload = {'command': 'gsa', 'descriptor': descriptor, 'gsa': report.to_dict()}
    return payload, EXIT_OK


def cmd_sweep_ball(d_min: int, d_max: int, radius: float, raw_options: Dict[str, Any]) -> Tuple[Dict[str, Any], int]:
    """cmd_validate on the uniform ball for d = d_min..d_max."""
    results = []
    code = EXIT_OK
    for d in range(d_min, d_max + 1):
        raw = {'body': {'kind': 'ball', 'radius': radius, 'dim': d}, 'potential': {'kind': 'uniform'}}
        if raw_options:
            raw['options'] = dict(raw_options)
        descriptor, body, pot = load_problem(raw)
        payload, sub_code = cmd_validate(descriptor, body, pot)
        results.append({'dim': d, 'status': payload['status'], 'reports': payload['reports'],
                        'references': payload['references']})
        code = max(code, sub_code)
    return {'command': 'sweep-ball', 'results': results}, code


# ============================================================================
# OUTPUT
# ============================================================================

def write_report(payload: Dict[str, Any], path: str):
    """Write the JSON report atomically (temporary file, then rename)."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix='.report-', suffix='.json', dir=directory)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write('\n')
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return '%.17g' % value
    return str(value)


def format_table(reports: List[Dict[str, Any]]) -> str:
    """Aligned text table of report dicts; floats with 17 significant digits."""
    if not reports:
        return '(no reports)'
    rows = [{
        'method': r['method'],
        'kind': r['kind'],
        'value': _fmt(r['value']),
        'ok': '✓' if r['assumptions_ok'] else '✗',
        'notes': '; '.join(r['notes']),
    } for r in reports]
    return pd.DataFrame(rows, columns=['method', 'kind', 'value', 'ok', 'notes']).to_string(index=False)


def print_summary(payload: Dict[str, Any]):
    command = payload.get('command')
    if command == 'sweep-ball':
        for result in payload['results']:
            marker = '✓' if result['status'] == 'ok' else '✗'
            print(f"{marker} d={result['dim']}: {result['status']}")
        return
    if command == 'gsa' and 'gsa' in payload:
        g = payload['gsa']
        print(f"Var f = {_fmt(g['variance_hat'])} (+/- {_fmt(g['variance_se'])}), scope {g['lambda_scope']}")
        rows = [{'input': f"x{i + 1}", 'dgsm': _fmt(g['dgsm'][i]), 'sobol_upper': _fmt(g['sobol_upper'][i]),
                 'std_error': _fmt(g['sobol_upper_se'][i]),
                 'flag': '⚠' if g['uninformative'][i] else ''} for i in range(len(g['dgsm']))]
        print(pd.DataFrame(rows).to_string(index=False))
        return
    print(format_table(payload.get('reports', [])))
    for ref in payload.get('references', []):
        print(f"  reference {ref['name']} ({ref['kind']}): {_fmt(ref['value'])}")
    if 'status' in payload:
        marker = {'ok': '✓', 'inapplicable': '⚠'}.get(payload['status'], '✗')
        print(f"{marker} sandwich {payload['status']}")


# ============================================================================
# ENTRY POINT
# ============================================================================

def _add_problem_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--spec', help='Descriptor file (JSON)')
    parser.add_argument('--body', choices=['ball', 'box', 'lp_ball', 'ball_complement'],
                        help='Body kind (orlicz bodies need --spec)')
    parser.add_argument('--radius', type=float, help='Ball / l^p ball / obstacle radius')
    parser.add_argument('--half-width', type=float, help='Half width of the box')
    parser.add_argument('--p', type=float, help='Exponent of the l^p ball')
    parser.add_argument('--dim', type=int, help='Dimension')
    parser.add_argument('--potential', help='uniform | gaussian | radial_power, or a JSON object')
    parser.add_argument('--alpha', type=float, help='Exponent of the radial_power potential')
    parser.add_argument('--out', help='Write the JSON report here')
    parser.add_argument('--seed', type=int, help='Seed for sampling')
    parser.add_argument('--grid-n', type=int, help='Radial grid points of the certificate engine')
    parser.add_argument('--degree', type=int, help='Galerkin polynomial degree')
    parser.add_argument('--trunc', type=float, help='Truncation radius for the ball complement')
    parser.add_argument('--sturm-n', type=int, help='Elements of the Sturm-Liouville mesh')
    parser.add_argument('--inflate-lower', type=float, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Certified lower bounds on Neumann spectral gaps of log-concave measures'
    )
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')
    sub = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (('bound', 'Run every applicable bound'),
                            ('validate', 'Check bounds against numerical references'),
                            ('certify', 'Run the weight certificate engine'),
                            ('gsa', 'Upper bounds on total Sobol indices')):
        p = sub.add_parser(name, help=help_text)
        _add_problem_flags(p)
        if name == 'certify':
            p.add_argument('--weight', help='Weight kind or JSON object')
        if name == 'gsa':
            p.add_argument('--samples', required=True, help='CSV with header x1..xd,f,g1..gd')
            p.add_argument('--lambda-scope', choices=['domain', 'per_input'], default='domain')

    sweep = sub.add_parser('sweep-ball', help='Validate the uniform ball over a range of dimensions')
    sweep.add_argument('--d-min', type=int, default=2)
    sweep.add_argument('--d-max', type=int, default=10)
    sweep.add_argument('--radius', type=float, default=1.0)
    sweep.add_argument('--out', help='Write the JSON report here')
    sweep.add_argument('--sturm-n', type=int)
    sweep.add_argument('--degree', type=int)
    sweep.add_argument('--inflate-lower', type=float, help=argparse.SUPPRESS)
    return parser


def run(args: argparse.Namespace) -> Tuple[Optional[Dict[str, Any]], int]:
    if args.command == 'sweep-ball':
        options = {k: v for k, v in (('sturm_n', args.sturm_n), ('degree', args.degree),
                                     ('inflate_lower', args.inflate_lower)) if v is not None}
        if args.d_min < 2 or args.d_max < args.d_min:
            raise InputError(f"invalid dimension range {args.d_min}..{args.d_max}")
        return cmd_sweep_ball(args.d_min, args.d_max, args.radius, options)

    descriptor, body, pot = load_problem(build_descriptor(args))
    if args.command == 'bound':
        return cmd_bound(descriptor, body, pot)
    if args.command == 'validate':
        return cmd_validate(descriptor, body, pot)
    if args.command == 'certify':
        return cmd_certify(descriptor, body, pot)
    return cmd_gsa(descriptor, body, pot, args.samples, args.lambda_scope)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    config.configure_logging(args.log_level)

    try:
        payload, code = run(args)
    except InputError as e:
        logger.error(f"Invalid input: {e}")
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_INPUT
    except (RuntimeError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"✗ {e}", file=sys.stderr)
        return EXIT_INTERNAL

    if getattr(args, 'out', None):
        write_report(payload, args.out)
    print_summary(payload)
    return code


if __name__ == '__main__':
    sys.exit(main())
