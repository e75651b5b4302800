"""
Input validation for problem descriptors.

A descriptor is the JSON document every front end (CLI, HTTP API) accepts:

    {
        "body": {"kind": "ball", "radius": 1, "dim": 4},
        "potential": {"kind": "uniform"},
        "weight": {"kind": "radial_poly", "coeffs": [3, 0, -1]},   # optional
        "options": {"seed": 0, "grid_n": 4096}                     # optional
    }

Unknown keys are rejected at every level so that a misspelled parameter
never silently falls back to a default.
"""

import json
import math
from typing import Any, Dict, Optional, Tuple, Union

import config

Result = Tuple[bool, Optional[str]]


class DescriptorValidator:
    """Validator for problem descriptors."""

    # Dimensions beyond this are out of range of the radial solvers' tests
    MAX_DIM = 200

    # Largest accepted descriptor text (characters)
    MAX_INPUT_LENGTH = 100000

    TOP_LEVEL_KEYS = {'body', 'potential', 'weight', 'options'}

    BODY_KEYS = {
        'ball': ({'radius'}, {'dim'}),
        'box': ({'half_width', 'dim'}, set()),
        'lp_ball': ({'p', 'dim'}, {'radius'}),
        'orlicz': ({'potentials', 'box_bound'}, set()),
        'ball_complement': ({'radius'}, {'dim'}),
    }

    ONE_DIM_KEYS = {
        'power': ({'p'}, {'scale'}),
        'asym_power': ({'p_plus', 'p_minus'}, {'scale'}),
        'gaussian': (set(), {'sigma'}),
        'uniform': (set(), set()),
    }

    # forms an Orlicz body accepts
    ORLICZ_FORMS = {'power', 'asym_power'}

    POTENTIAL_KEYS = {
        'uniform': (set(), set()),
        'radial_power': ({'alpha'}, set()),
        'gaussian': (set(), set()),
        'product': ({'factors'}, set()),
    }

    WEIGHT_KEYS = {
        'identity': (set(), set()),
        'radial_poly': ({'coeffs'}, set()),
        'radial_exp_power': ({'epsilon', 'alpha'}, set()),
        'radial_inverse_square': ({'c'}, set()),
        'radial_bessel': ({'k', 'nu'}, set()),
        'per_coordinate_cos': (set(), {'beta'}),
    }

    # option -> (type, minimum)
    OPTION_TYPES = {
        'seed': (int, 0),
        'grid_n': (int, 16),
        'boundary_samples': (int, 1),
        'mc_samples': (int, 100),
        'sturm_n': (int, 32),
        'degree': (int, 1),
        'trunc': (float, 0.0),
        'inflate_lower': (float, 0.0),
    }

    @staticmethod
    def _is_number(value: Any) -> bool:
        return (isinstance(value, (int, float)) and not isinstance(value, bool)
                and math.isfinite(value))

    @classmethod
    def _check_keys(cls, what: str, spec: Any, table: Dict[str, Tuple[set, set]],
                    tag: str = 'kind') -> Result:
        if not isinstance(spec, dict):
            return False, f"{what} must be an object, got {type(spec).__name__}"
        kind = spec.get(tag)
        if kind not in table:
            return False, f"Unknown {what} {tag} {kind!r} (expected one of {', '.join(sorted(table))})"
        required, optional = table[kind]
        keys = set(spec) - {tag}
        missing = required - keys
        if missing:
            return False, f"{what} '{kind}' is missing {', '.join(sorted(missing))}"
        unknown = keys - required - optional
        if unknown:
            return False, f"{what} '{kind}' has unknown keys {', '.join(sorted(unknown))}"
        return True, None

    @classmethod
    def _check_positive(cls, what: str, spec: Dict[str, Any], *names: str) -> Result:
        for name in names:
            if name in spec and not (cls._is_number(spec[name]) and spec[name] > 0):
                return False, f"{what}.{name} must be a positive number, got {spec[name]!r}"
        return True, None

    @classmethod
    def validate_dim(cls, dim: Any) -> Result:
        if isinstance(dim, bool) or not isinstance(dim, int):
            return False, f"dim must be an integer, got {dim!r}"
        if dim < 2:
            return False, f"dim must be >= 2, got {dim}"
        if dim > cls.MAX_DIM:
            return False, f"dim must be <= {cls.MAX_DIM}, got {dim}"
        return True, None

    @classmethod
    def validate_one_dim(cls, spec: Any, forms: Optional[set] = None) -> Result:
        """Validate an Orlicz potential or a product factor ({"form": ...})."""
        table = cls.ONE_DIM_KEYS
        if forms is not None:
            table = {form: keys for form, keys in table.items() if form in forms}
        ok, error = cls._check_keys('function', spec, table, tag='form')
        if not ok:
            return ok, error
        ok, error = cls._check_positive('function', spec, 'scale', 'sigma')
        if not ok:
            return ok, error
        for name in ('p', 'p_plus', 'p_minus'):
            if name in spec and not (cls._is_number(spec[name]) and spec[name] >= 1):
                return False, f"function.{name} must be a number >= 1, got {spec[name]!r}"
        return True, None

    @classmethod
    def validate_body(cls, spec: Any) -> Result:
        """
        Validate a body descriptor.

        Args:
            spec: {"kind": "ball"|"box"|"lp_ball"|"orlicz"|"ball_complement", ...}

        Returns:
            Tuple of (is_valid, error_message)
        """
        ok, error = cls._check_keys('body', spec, cls.BODY_KEYS)
        if not ok:
            return ok, error
        ok, error = cls._check_positive('body', spec, 'radius', 'half_width', 'box_bound')
        if not ok:
            return ok, error
        if 'dim' in spec:
            ok, error = cls.validate_dim(spec['dim'])
            if not ok:
                return ok, error
        if 'p' in spec and not (cls._is_number(spec['p']) and spec['p'] >= 1):
            return False, f"body.p must be a number >= 1, got {spec['p']!r}"
        if spec['kind'] == 'orlicz':
            potentials = spec['potentials']
            if not isinstance(potentials, list):
                return False, "body.potentials must be a list"
            ok, error = cls.validate_dim(len(potentials))
            if not ok:
                return False, f"body.potentials: {error}"
            for u in potentials:
                ok, error = cls.validate_one_dim(u, forms=cls.ORLICZ_FORMS)
                if not ok:
                    return ok, error
        return True, None

    @classmethod
    def validate_potential(cls, spec: Any) -> Result:
        ok, error = cls._check_keys('potential', spec, cls.POTENTIAL_KEYS)
        if not ok:
            return ok, error
        if 'alpha' in spec and not (cls._is_number(spec['alpha']) and spec['alpha'] > 1):
            return False, f"potential.alpha must be a number > 1, got {spec['alpha']!r}"
        if spec['kind'] == 'product':
            factors = spec['factors']
            if not isinstance(factors, list) or not factors:
                return False, "potential.factors must be a non-empty list"
            for f in factors:
                ok, error = cls.validate_one_dim(f)
                if not ok:
                    return ok, error
        return True, None

    @classmethod
    def validate_weight(cls, spec: Any) -> Result:
        ok, error = cls._check_keys('weight', spec, cls.WEIGHT_KEYS)
        if not ok:
            return ok, error
        kind = spec['kind']
        if kind == 'radial_poly':
            coeffs = spec['coeffs']
            if not isinstance(coeffs, list) or not coeffs or not all(cls._is_number(c) for c in coeffs):
                return False, "weight.coeffs must be a non-empty list of numbers"
        for name in ('epsilon', 'c', 'nu'):
            if name in spec and not cls._is_number(spec[name]):
                return False, f"weight.{name} must be a number, got {spec[name]!r}"
        ok, error = cls._check_positive('weight', spec, 'k')
        if not ok:
            return ok, error
        if 'alpha' in spec and not (cls._is_number(spec['alpha']) and spec['alpha'] > 1):
            return False, f"weight.alpha must be a number > 1, got {spec['alpha']!r}"
        if 'beta' in spec and spec['beta'] != 'auto':
            if not (cls._is_number(spec['beta']) and spec['beta'] > 0):
                return False, f"weight.beta must be 'auto' or a positive number, got {spec['beta']!r}"
        return True, None

    @classmethod
    def validate_options(cls, spec: Any) -> Result:
        if not isinstance(spec, dict):
            return False, f"options must be an object, got {type(spec).__name__}"
        for name, value in spec.items():
            if name not in cls.OPTION_TYPES:
                return False, f"Unknown option {name!r}"
            kind, minimum = cls.OPTION_TYPES[name]
            if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
                return False, f"option {name} must be an integer, got {value!r}"
            if not cls._is_number(value):
                return False, f"option {name} must be a number, got {value!r}"
            if value < minimum:
                return False, f"option {name} must be >= {minimum}, got {value}"
        return True, None


def _with_defaults(options: Dict[str, Any]) -> Dict[str, Any]:
    merged = {
        'seed': config.SEED,
        'grid_n': config.GRID_N,
        'boundary_samples': config.BOUNDARY_SAMPLES,
        'mc_samples': config.MC_SAMPLES,
        'sturm_n': config.STURM_N,
        'degree': config.GALERKIN_DEGREE,
        'inflate_lower': 1.0,
    }
    merged.update(options)
    return merged


def validate_descriptor(raw: Union[str, bytes, Dict[str, Any]]) -> Tuple[bool, Optional[Dict[str, Any]], Optional[str]]:
    """
    Validate a descriptor and fill in option defaults.

    Args:
        raw: Descriptor as a dict or JSON text

    Returns:
        Tuple of (is_valid, cleaned_descriptor, error_message)
    """
    if isinstance(raw, (str, bytes)):
        if len(raw) > DescriptorValidator.MAX_INPUT_LENGTH:
            return False, None, f"Descriptor too long (maximum {DescriptorValidator.MAX_INPUT_LENGTH} characters)"
        try:
            raw = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            return False, None, f"Malformed JSON: {e}"

    if not isinstance(raw, dict):
        return False, None, f"Descriptor must be an object, got {type(raw).__name__}"
    unknown = set(raw) - DescriptorValidator.TOP_LEVEL_KEYS
    if unknown:
        return False, None, f"Unknown descriptor keys: {', '.join(sorted(unknown))}"
    if 'body' not in raw:
        return False, None, "Descriptor is missing 'body'"

    ok, error = DescriptorValidator.validate_body(raw['body'])
    if not ok:
        return False, None, error
    potential = raw.get('potential', {'kind': 'uniform'})
    ok, error = DescriptorValidator.validate_potential(potential)
    if not ok:
        return False, None, error
    if 'weight' in raw:
        ok, error = DescriptorValidator.validate_weight(raw['weight'])
        if not ok:
            return False, None, error
    options = raw.get('options', {})
    ok, error = DescriptorValidator.validate_options(options)
    if not ok:
        return False, None, error

    cleaned = {'body': dict(raw['body']), 'potential': dict(potential),
               'options': _with_defaults(options)}
    if 'weight' in raw:
        cleaned['weight'] = dict(raw['weight'])
    return True, cleaned, None
