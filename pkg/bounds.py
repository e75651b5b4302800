"""
Spectral gap bounds for log-concave measures on convex bodies.

Closed-form lower bounds (Payne-Weinberger, the radial corollary, the ball
exp-weight estimate, Orlicz bodies, Subbotin measures, the Gaussian outside
a ball), the exact gaps of the ball and the hypercube, Weinberger's upper
bound and its reverse comparison, and a numerical certificate engine that
turns any admissible diagonal weight W into the lower bound

    lambda_1 >= inf over Omega of the smallest eigenvalue of Hess V - (L W) W^-1

once the boundary matrix (Jac eta - W <grad W^-1, eta>) restricted to the
tangent hyperplane has been checked to be nonnegative.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

import config
from geometry import (Ball, BallComplement, Body, Box, boundary_samples, diameter,
                      orlicz_view, radii, rho_min, tangent_restricted_min, unit_ball_volume, volume)
from measures import (Potential, Product, RadialPotential, RadialPower, Uniform,
                      brascamp_lieb_bound, radial_log_moment)
from reports import BoundReport, inapplicable
from special_functions import bessel_j, bessel_series_scaled, neumann_root  # noqa: F401 (bessel_j re-exported)

logger = logging.getLogger(__name__)

Q_GRID_N = 4001
# Points where |U'| is this small relative to its maximum impose no constraint on q
Q_SLOPE_FLOOR = 1e-12
ORIGIN_OFFSET = 1e-8
# Monte Carlo volumes enter the volume bounds shifted by this many standard errors
VOLUME_SIGMAS = 3.0


def _check_dim_radius(d: int, R: float, min_dim: int = 2):
    if int(d) != d or d < min_dim:
        raise ValueError(f"dimension must be an integer >= {min_dim}, got {d}")
    if not R > 0.0:
        raise ValueError(f"radius must be positive, got {R}")


def _is_log_concave(pot: Potential, body: Body) -> bool:
    if isinstance(pot, Product):
        return pot.is_log_concave(body.box_bound())
    return pot.is_log_concave(radii(body)[0])


# ============================================================================
# EXACT VALUES
# ============================================================================

def exact_ball_gap(d: int, R: float) -> BoundReport:
    """
    Neumann gap of the uniform measure on B(0, R): p^2 / R^2, with p the first
    positive zero of d/du[u^(1-d/2) J_{d/2}(u)].
    """
    _check_dim_radius(d, R)
    p = neumann_root(d / 2.0)
    return BoundReport(p * p / (R * R), 'exact_ball_gap', kind='exact',
                       diagnostics={'root': p, 'dim': float(d), 'radius': R})


def exact_box_gap(R: float) -> BoundReport:
    """pi^2 / (4 R^2) for the uniform measure on [-R, R]^d, in every dimension."""
    if not R > 0.0:
        raise ValueError(f"half_width must be positive, got {R}")
    return BoundReport(math.pi ** 2 / (4.0 * R * R), 'exact_box_gap', kind='exact',
                       diagnostics={'half_width': R})


def optimal_radial_weight_gap(d: int, R: float) -> BoundReport:
    """
    Best lower bound reachable with a radial scalar weight on the uniform ball.

    The weight is w(r) = S_{d/2-1}(k r) (a regular radial Laplacian
    eigenfunction) and k R is pushed to the first zero of w + r w', where the
    boundary condition saturates.
    """
    _check_dim_radius(d, R)
    p = neumann_root(d / 2.0 - 1.0)
    return BoundReport(p * p / (R * R), 'optimal_radial_weight',
                       diagnostics={'root': p, 'dim': float(d), 'radius': R})


# ============================================================================
# CLOSED-FORM BOUNDS
# ============================================================================

def payne_weinberger(body: Body, pot: Potential) -> BoundReport:
    """pi^2 / diam(Omega)^2 for log-concave measures on convex bodies."""
    method = 'payne_weinberger'
    if not body.is_convex or not body.is_bounded:
        return inapplicable(method, f"{body.kind} is not a convex body")
    if not _is_log_concave(pot, body):
        return inapplicable(method, f"{pot.kind} potential is not convex on the body")
    diam = diameter(body)
    return BoundReport(math.pi ** 2 / diam ** 2, method, diagnostics={'diameter': diam})


def ball_exp_weight_bound(d: int, R: float) -> BoundReport:
    """(d-1)/R^2 for the uniform ball, from the weight exp(-r^2 / (2 R^2))."""
    _check_dim_radius(d, R)
    return BoundReport((d - 1.0) / (R * R), 'ball_exp_weight',
                       diagnostics={'dim': float(d), 'radius': R})


def _interior_sup(pot: RadialPotential, r_bar: float, n: int) -> float:
    # sup over the body of r^2 (1 + 2 max{V'/(r V''), 1})
    if isinstance(pot, Uniform):
        return 3.0 * r_bar ** 2
    if isinstance(pot, RadialPower):
        return r_bar ** 2 * (1.0 + 2.0 * max(1.0 / (pot.alpha - 1.0), 1.0))
    r = np.linspace(r_bar / n, r_bar, n)
    dv = pot.dv(r)
    d2v = pot.d2v(r)
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(d2v > 0.0, dv / (r * d2v), np.where(dv > 0.0, np.inf, 1.0))
    return float(np.max(r * r * (1.0 + 2.0 * np.maximum(ratio, 1.0))))


def corollary_radial(pot: Potential, body: Body, n_boundary: int = None,
                     grid_n: int = None) -> BoundReport:
    """
    2d/C for a radial log-concave measure on a convex body containing the origin.

    C = max{ sup_Omega r^2 (1 + 2 max{V'/(r V''), 1}), sup_boundary r^2 + 2 r / rho }.

    Args:
        pot: Radial potential
        body: Convex body
        n_boundary: Boundary samples for the second supremum (closed form on the ball)
        grid_n: Radial grid for potentials without a closed form

    Returns:
        BoundReport with C and both suprema in the diagnostics
    """
    method = 'corollary_radial'
    if not isinstance(pot, RadialPotential):
        raise ValueError(f"{pot.kind} potential is not radial")
    if not body.is_convex or not body.is_bounded:
        return inapplicable(method, f"{body.kind} is not a convex body")
    n_boundary = n_boundary or config.BOUNDARY_SAMPLES
    grid_n = grid_n or config.GRID_N

    r_bar, _ = radii(body)
    interior = _interior_sup(pot, r_bar, grid_n)

    if isinstance(body, Ball):
        boundary = 3.0 * body.radius ** 2
    else:
        sample = boundary_samples(body, n_boundary, config.SEED)
        if np.any(sample.rho <= 0.0):
            boundary = math.inf
        else:
            r = np.linalg.norm(sample.points, axis=1)
            boundary = float(np.max(r * r + 2.0 * r / sample.rho))

    C = max(interior, boundary)
    diagnostics = {'C': C, 'interior_sup': interior, 'boundary_sup': boundary, 'r_bar': r_bar}
    if not math.isfinite(C):
        return inapplicable(method, "C is infinite (the boundary has flat parts)", diagnostics=diagnostics)
    return BoundReport(2.0 * body.dim / C, method, diagnostics=diagnostics)


def weinberger_upper(body: Body) -> BoundReport:
    """Upper bound (|B(0,1)| / |Omega|)^(2/d) lambda_1(B(0,1)) for the uniform measure."""
    d = body.dim
    vol, vol_err = volume(body, config.MC_SAMPLES, config.SEED)
    # smaller volume, larger upper bound
    used = vol - VOLUME_SIGMAS * vol_err
    if used <= 0.0:
        return inapplicable('weinberger', f"volume estimate {vol:.3g} +/- {vol_err:.2g} is not resolved",
                            kind='upper')
    unit = unit_ball_volume(d)
    ball = exact_ball_gap(d, 1.0).value
    value = (unit / used) ** (2.0 / d) * ball
    return BoundReport(value, 'weinberger', kind='upper',
                       diagnostics={'volume': vol, 'volume_std_error': vol_err, 'volume_used': used,
                                    'unit_ball_volume': unit, 'unit_ball_gap': ball})


def reverse_comparison(body: Body) -> BoundReport:
    """
    Lower bound comparing a uniformly convex body with the ball of equal volume.

    2 d r_under^2 / ((d + 2) max{3 r_bar^2, r_bar^2 + 2 r_bar / rho})
        * (|B(0,1)| / |Omega|)^(2/d) * lambda_1(B(0,1))
    """
    method = 'reverse_comparison'
    if not body.is_convex or not body.is_bounded:
        return inapplicable(method, f"{body.kind} is not a convex body")
    rho = rho_min(body, config.BOUNDARY_SAMPLES, config.SEED)
    if rho <= 0.0:
        return inapplicable(method, "body is not uniformly convex (rho_min <= 0)",
                            diagnostics={'rho_min': rho})
    d = body.dim
    r_bar, r_under = radii(body)
    vol, vol_err = volume(body, config.MC_SAMPLES, config.SEED)
    # larger volume, smaller lower bound
    used = vol + VOLUME_SIGMAS * vol_err
    unit = unit_ball_volume(d)
    ball = exact_ball_gap(d, 1.0).value
    factor = 2.0 * d * r_under ** 2 / ((d + 2.0) * max(3.0 * r_bar ** 2, r_bar ** 2 + 2.0 * r_bar / rho))
    volume_factor = (unit / used) ** (2.0 / d)
    notes = [f"Monte Carlo volume {vol:.6g} +/- {vol_err:.3g}, used {used:.6g}"] if vol_err > 0.0 else []
    return BoundReport(factor * volume_factor * ball, method, diagnostics={
        'rho_min': rho, 'r_bar': r_bar, 'r_under': r_under, 'volume': vol,
        'volume_std_error': vol_err, 'volume_used': used, 'shape_factor': factor,
        'volume_factor': volume_factor, 'unit_ball_gap': ball,
    }, notes=notes)


def _axis_q(u, R: float, n: int = Q_GRID_N) -> Tuple[float, float]:
    # inf of U''/|U'| over [-R, R], skipping points where U' vanishes
    xs = np.linspace(-R, R, n)
    slope = np.abs(u.first(xs))
    floor = Q_SLOPE_FLOOR * max(float(np.max(slope)), 1e-300)
    active = slope > floor
    if not np.any(active):
        return math.inf, 0.0
    ratio = np.full(n, np.inf)
    ratio[active] = u.second(xs[active]) / slope[active]
    i = int(np.argmin(ratio))
    best, where = float(ratio[i]), float(xs[i])

    def objective(x):
        s = abs(float(u.first(x)))
        if s <= floor:
            return math.inf
        return float(u.second(x)) / s

    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
    if hi > lo:
        res = minimize_scalar(objective, bounds=(lo, hi), method='bounded', options={'xatol': 1e-14})
        if res.fun < best:
            best, where = float(res.fun), float(res.x)
    return best, where


def orlicz_q(body: Body) -> Tuple[float, int, float]:
    """
    The largest q with q |U_i'| <= U_i'' on [-R, R] for every i.

    Returns:
        (q, axis, x) where the infimum is attained
    """
    orlicz = orlicz_view(body)
    if orlicz is None:
        raise ValueError(f"{body.kind} is not an Orlicz body")
    R = orlicz.box_bound()
    best = (math.inf, 0, 0.0)
    seen: Dict[str, Tuple[float, float]] = {}
    for i, u in enumerate(orlicz.potentials):
        key = repr(u.to_json())
        if key not in seen:
            seen[key] = _axis_q(u, R)
        q, x = seen[key]
        if q < best[0]:
            best = (q, i, x)
    return best


def orlicz_bound(body: Body) -> BoundReport:
    """arctan(2 R q / pi)^2 / R^2 for the uniform measure on an Orlicz body inside [-R, R]^d."""
    method = 'orlicz'
    orlicz = orlicz_view(body)
    if orlicz is None:
        raise ValueError(f"{body.kind} is not an Orlicz body")
    R = orlicz.box_bound()
    q, axis, x = orlicz_q(orlicz)
    if not math.isfinite(q):
        return inapplicable(method, "every U_i' vanishes on [-R, R]")
    beta = math.atan(2.0 * R * q / math.pi) / R
    return BoundReport(beta * beta, method, diagnostics={
        'q': q, 'argmin_axis': float(axis), 'argmin_x': x, 'beta': beta, 'box_bound': R,
    })


def subbotin_bound(alpha: float, d: int, rho: float, r_bar: float) -> BoundReport:
    """
    Two-regime bound for exp(-|x|^alpha / alpha) on a uniformly convex body.

    max{ 2 C d, (alpha/4) ((2-alpha)/(alpha-1))^(1-2/alpha) d^(1-2/alpha) }
    with C = min{ (alpha-1)/((alpha+1) r_bar^2), rho/(r_bar^2 rho + 2 r_bar) }.
    At alpha = 2 the second branch is 1/2 (0^0 = 1).
    """
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (1, 2], got {alpha}")
    if not rho > 0.0:
        raise ValueError(f"body must be uniformly convex (rho > 0), got rho = {rho}")
    _check_dim_radius(d, r_bar)
    C = min((alpha - 1.0) / ((alpha + 1.0) * r_bar ** 2), rho / (r_bar ** 2 * rho + 2.0 * r_bar))
    exponent = 1.0 - 2.0 / alpha
    curvature = 2.0 * C * d
    dimension = alpha / 4.0 * ((2.0 - alpha) / (alpha - 1.0)) ** exponent * d ** exponent
    return BoundReport(max(curvature, dimension), 'subbotin', diagnostics={
        'C': C, 'branch_curvature': curvature, 'branch_dimension': dimension,
        'brascamp_lieb_baseline': (alpha - 1.0) * r_bar ** (alpha - 2.0),
        'asymptotic_order': max(d / r_bar ** 2, d ** exponent),
    })


def subbotin_ball_bound(alpha: float, d: int, R: float) -> BoundReport:
    """subbotin_bound on B(0, R), where C reduces to (alpha-1)/((alpha+1) R^2)."""
    report = subbotin_bound(alpha, d, 1.0 / R, R)
    return BoundReport(report.value, 'subbotin_ball', diagnostics=report.diagnostics)


def gaussian_complement_bound(d: int, R: float) -> BoundReport:
    """
    min{(d-4)/R^2, 1/3} for the standard Gaussian restricted to R^d minus B(0, R).

    Raises:
        ValueError: If d < 5
    """
    if int(d) != d or d < 5:
        raise ValueError(f"the Gaussian obstacle bound requires d >= 5, got d = {d}")
    _check_dim_radius(d, R)
    critical_sq = (d - 4.0) * (1.0 + math.sqrt(1.0 + R * R / (d - 4.0)))
    return BoundReport(min((d - 4.0) / (R * R), 1.0 / 3.0), 'gaussian_complement', diagnostics={
        'asymptotic_regime': min(d / (R * R), 1.0),
        'critical_radius': math.sqrt(critical_sq),
        'dim': float(d), 'radius': R,
    })


def bcgm_bound(d: int, R: float) -> BoundReport:
    """d / (2d + R^2), the radial-part bound for the Gaussian outside a ball."""
    _check_dim_radius(d, R)
    return BoundReport(d / (2.0 * d + R * R), 'bcgm', diagnostics={'dim': float(d), 'radius': R})


def radial_moment_bracket(pot: Potential, body: Body) -> Tuple[BoundReport, BoundReport]:
    """
    (d-1) m0/m2 <= lambda_1 <= d m0/m2 for a log-concave radial measure on a ball,
    m_k = int_0^R r^k r^(d-1) exp(-v(r)) dr.
    """
    if not isinstance(body, Ball):
        raise ValueError(f"the moment bracket needs a ball, got {body.kind}")
    ratio = math.exp(radial_log_moment(pot, body, 0) - radial_log_moment(pot, body, 2))
    d = body.dim
    diagnostics = {'m0_over_m2': ratio}
    return (BoundReport((d - 1.0) * ratio, 'moment_bracket_lower', diagnostics=dict(diagnostics)),
            BoundReport(d * ratio, 'moment_bracket_upper', kind='upper', diagnostics=dict(diagnostics)))


# ============================================================================
# WEIGHT CERTIFICATES
# ============================================================================

class WeightSpec:
    kind = 'weight'

    def to_json(self) -> Dict[str, Any]:
        return {'kind': self.kind}


class RadialWeight(WeightSpec):
    """W(x) = w(|x|) I."""

    def w(self, r):
        raise NotImplementedError

    def dw(self, r):
        raise NotImplementedError

    def d2w(self, r):
        raise NotImplementedError

    def laplacian_limit(self, d: int) -> Optional[float]:
        """lim_{r->0} (w'' + (d-1) w'/r) / w, or None if w is not smooth at 0."""
        return None


class IdentityWeight(RadialWeight):
    kind = 'identity'

    def w(self, r):
        return np.ones_like(np.asarray(r, dtype=float))

    def dw(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    d2w = dw

    def laplacian_limit(self, d):
        return 0.0


class RadialPolyWeight(RadialWeight):
    """w(r) = sum_k coeffs[k] r^k."""

    kind = 'radial_poly'

    def __init__(self, coeffs):
        self.coeffs = [float(c) for c in coeffs]
        if not self.coeffs:
            raise ValueError("radial_poly needs at least one coefficient")
        self._poly = np.polynomial.Polynomial(self.coeffs)

    def w(self, r):
        return self._poly(np.asarray(r, dtype=float))

    def dw(self, r):
        return self._poly.deriv(1)(np.asarray(r, dtype=float))

    def d2w(self, r):
        return self._poly.deriv(2)(np.asarray(r, dtype=float))

    def laplacian_limit(self, d):
        c = self.coeffs + [0.0, 0.0]
        if c[1] != 0.0 or c[0] <= 0.0:
            return None
        return 2.0 * d * c[2] / c[0]

    def to_json(self):
        return {'kind': self.kind, 'coeffs': list(self.coeffs)}


class RadialExpPowerWeight(RadialWeight):
    """w(r) = exp(epsilon r^alpha / alpha)."""

    kind = 'radial_exp_power'

    def __init__(self, epsilon: float, alpha: float):
        if not alpha > 1.0:
            raise ValueError(f"alpha must be > 1, got {alpha}")
        self.epsilon = float(epsilon)
        self.alpha = float(alpha)

    def w(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(self.epsilon * r ** self.alpha / self.alpha)

    def dw(self, r):
        r = np.asarray(r, dtype=float)
        return self.epsilon * r ** (self.alpha - 1.0) * self.w(r)

    def d2w(self, r):
        r = np.asarray(r, dtype=float)
        a, e = self.alpha, self.epsilon
        return (e * (a - 1.0) * r ** (a - 2.0) + e * e * r ** (2.0 * a - 2.0)) * self.w(r)

    def laplacian_limit(self, d):
        if self.alpha == 2.0:
            return d * self.epsilon
        if self.alpha > 2.0:
            return 0.0
        return None

    def to_json(self):
        return {'kind': self.kind, 'epsilon': self.epsilon, 'alpha': self.alpha}


class RadialInverseSquareWeight(RadialWeight):
    """w(r) = c + r^-2."""

    kind = 'radial_inverse_square'

    def __init__(self, c: float):
        self.c = float(c)

    def w(self, r):
        return self.c + np.asarray(r, dtype=float) ** -2.0

    def dw(self, r):
        return -2.0 * np.asarray(r, dtype=float) ** -3.0

    def d2w(self, r):
        return 6.0 * np.asarray(r, dtype=float) ** -4.0

    def to_json(self):
        return {'kind': self.kind, 'c': self.c}


_scaled = np.vectorize(bessel_series_scaled, otypes=[float])


class RadialBesselWeight(RadialWeight):
    """
    w(r) = S_nu(k r) = Gamma(nu+1) (k r / 2)^(-nu) J_nu(k r).

    With nu = d/2 - 1 this is the regular radial solution of
    Delta w = -k^2 w.
    """

    kind = 'radial_bessel'

    def __init__(self, k: float, nu: float):
        if not k > 0.0 or nu < 0.0:
            raise ValueError(f"radial_bessel needs k > 0 and nu >= 0, got k={k}, nu={nu}")
        self.k = float(k)
        self.nu = float(nu)

    def w(self, r):
        return _scaled(self.nu, self.k * np.asarray(r, dtype=float))

    def dw(self, r):
        z = self.k * np.asarray(r, dtype=float)
        return -self.k * z / (2.0 * (self.nu + 1.0)) * _scaled(self.nu + 1.0, z)

    def d2w(self, r):
        z = self.k * np.asarray(r, dtype=float)
        nu = self.nu
        return (-self.k ** 2 / (2.0 * (nu + 1.0))
                * (_scaled(nu + 1.0, z) - z * z / (2.0 * (nu + 2.0)) * _scaled(nu + 2.0, z)))

    def laplacian_limit(self, d):
        return -d * self.k ** 2 / (2.0 * (self.nu + 1.0))

    def to_json(self):
        return {'kind': self.kind, 'k': self.k, 'nu': self.nu}


class CosWeight(WeightSpec):
    """W = diag(cos(beta x_i)); beta None is resolved to arctan(2 R q / pi) / R."""

    kind = 'per_coordinate_cos'

    def __init__(self, beta: Optional[float] = None):
        if beta is not None and not beta > 0.0:
            raise ValueError(f"beta must be positive, got {beta}")
        self.beta = beta

    def resolved(self, body: Body) -> 'CosWeight':
        if self.beta is not None:
            return self
        orlicz = orlicz_view(body)
        R = orlicz.box_bound()
        q = orlicz_q(orlicz)[0]
        return CosWeight(math.atan(2.0 * R * q / math.pi) / R)

    def w(self, x):
        return np.cos(self.beta * np.asarray(x, dtype=float))

    def dw(self, x):
        return -self.beta * np.sin(self.beta * np.asarray(x, dtype=float))

    def d2w(self, x):
        return -self.beta ** 2 * np.cos(self.beta * np.asarray(x, dtype=float))

    def to_json(self):
        return {'kind': self.kind, 'beta': 'auto' if self.beta is None else self.beta}


def weight_from_json(spec: Dict[str, Any]) -> WeightSpec:
    kind = spec.get('kind')
    if kind == 'identity':
        return IdentityWeight()
    if kind == 'radial_poly':
        return RadialPolyWeight(spec['coeffs'])
    if kind == 'radial_exp_power':
        return RadialExpPowerWeight(float(spec['epsilon']), float(spec['alpha']))
    if kind == 'radial_inverse_square':
        return RadialInverseSquareWeight(float(spec['c']))
    if kind == 'radial_bessel':
        return RadialBesselWeight(float(spec['k']), float(spec['nu']))
    if kind == 'per_coordinate_cos':
        beta = spec.get('beta', 'auto')
        return CosWeight(None if beta == 'auto' else float(beta))
    raise ValueError(f"Unknown weight kind: {kind!r}")


@dataclass(frozen=True)
class GridSpec:
    radial_points: int = config.GRID_N
    boundary_samples: int = config.BOUNDARY_SAMPLES
    seed: int = config.SEED
    tol: float = 1e-9

    @classmethod
    def from_options(cls, options: Dict[str, Any]) -> 'GridSpec':
        return cls(radial_points=int(options.get('grid_n', config.GRID_N)),
                   boundary_samples=int(options.get('boundary_samples', config.BOUNDARY_SAMPLES)),
                   seed=int(options.get('seed', config.SEED)))


def interior_eigenvalues(pot: Potential, weight: RadialWeight, r, d: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    (radial, tangential) eigenvalues of Hess V - (L w / w) I at radii r > 0,
    with L w = w'' + ((d-1)/r - V') w'.
    """
    if not isinstance(pot, RadialPotential):
        raise ValueError(f"{pot.kind} potential is not radial")
    r = np.asarray(r, dtype=float)
    w = weight.w(r)
    lw = (weight.d2w(r) + ((d - 1.0) / r - pot.dv(r)) * weight.dw(r)) / w
    return pot.d2v(r) - lw, pot.dv(r) / r - lw


def _radial_grid(body: Body, n: int) -> np.ndarray:
    if isinstance(body, BallComplement):
        R = body.radius
        far = R + 10.0 + 3.0 * math.sqrt(body.dim)
        return np.unique(np.concatenate([
            np.linspace(R, far, n // 2),
            np.geomspace(R, 1e4 * max(R, 1.0), n - n // 2),
        ]))
    r_bar = radii(body)[0]
    eps = ORIGIN_OFFSET * r_bar
    return np.unique(np.concatenate([
        np.geomspace(eps, r_bar, n // 2),
        np.linspace(eps, r_bar, n - n // 2),
    ]))


def _certify_radial(pot: RadialPotential, body: Body, weight: RadialWeight,
                    grid: GridSpec) -> BoundReport:
    method = f"certificate[{weight.kind}]"
    d = body.dim
    r = _radial_grid(body, grid.radial_points)
    if np.any(weight.w(r) <= 0.0):
        raise ValueError(f"{weight.kind} weight is not positive on the radial range")

    radial, tangential = interior_eigenvalues(pot, weight, r, d)
    smallest = np.minimum(radial, tangential)
    i = int(np.argmin(smallest))
    value, argmin_r = float(smallest[i]), float(r[i])

    if not isinstance(body, BallComplement):
        limit = pot.tangential_limit()
        lap = weight.laplacian_limit(d)
        if limit is not None and lap is not None and limit - lap < value:
            value, argmin_r = limit - lap, 0.0

    # rho(x) + (w'/w)(r) <x, eta>/r >= 0 on the boundary
    if isinstance(body, (Ball, BallComplement)):
        R = body.radius
        outward = 1.0 if isinstance(body, Ball) else -1.0
        rho = 1.0 / R if isinstance(body, Ball) else -1.0 / R
        margins = np.array([rho + float(weight.dw(R) / weight.w(R)) * outward])
        radius_at = np.array([R])
    else:
        sample = boundary_samples(body, grid.boundary_samples, grid.seed)
        radius_at = np.linalg.norm(sample.points, axis=1)
        if np.any(weight.w(radius_at) <= 0.0):
            raise ValueError(f"{weight.kind} weight is not positive on the boundary")
        cosine = np.sum(sample.points * sample.normals, axis=1) / radius_at
        margins = sample.rho + weight.dw(radius_at) / weight.w(radius_at) * cosine
    j = int(np.argmin(margins))
    margin = float(margins[j])

    diagnostics = {
        'interior_min': value, 'argmin_r': argmin_r,
        'boundary_margin': margin, 'worst_boundary_r': float(radius_at[j]),
        'grid_points': float(r.size), 'boundary_samples': float(margins.size),
    }
    return _certificate_report(method, value, margin, grid.tol, diagnostics)


def _certify_per_coordinate(pot: Potential, body: Body, weight: WeightSpec,
                            grid: GridSpec) -> BoundReport:
    orlicz = orlicz_view(body)
    if orlicz is None and not isinstance(weight, IdentityWeight):
        raise ValueError(f"per-coordinate weights need an Orlicz body, got {body.kind}")
    if isinstance(weight, CosWeight):
        weight = weight.resolved(body)
    method = f"certificate[{weight.kind}]"
    R = body.box_bound()
    if isinstance(weight, CosWeight) and not weight.beta < math.pi / (2.0 * R):
        raise ValueError(f"cos weight needs beta < pi/(2R) = {math.pi / (2.0 * R):.6g}, got {weight.beta}")

    if isinstance(pot, Product):
        if pot.dim != body.dim:
            raise ValueError(f"product potential has {pot.dim} factors, body has dimension {body.dim}")
        factors = pot.factors
    elif isinstance(pot, Uniform):
        factors = None
    else:
        raise ValueError(f"per-coordinate weights need a uniform or product potential, got {pot.kind}")

    xs = np.linspace(-R, R, grid.radial_points)
    w, dw, d2w = weight_axis(weight, xs)
    if np.any(w <= 0.0):
        raise ValueError(f"{weight.kind} weight is not positive on [-R, R]")
    value, argmin_axis, argmin_x = math.inf, 0, 0.0
    for i in range(body.dim):
        if factors is None:
            row = -d2w / w
        else:
            v = factors[i]
            row = v.second(xs) - (d2w - v.first(xs) * dw) / w
        k = int(np.argmin(row))
        if row[k] < value:
            value, argmin_axis, argmin_x = float(row[k]), i, float(xs[k])
        if factors is None:
            break

    sample = boundary_samples(body, grid.boundary_samples, grid.seed)
    if orlicz is None:
        margins = sample.rho
    else:
        points = sample.points
        bw, bdw, _ = weight_axis(weight, points)
        hess = orlicz.hessian_diagonal(points) + bdw / bw * orlicz.gradient(points)
        hess = hess[..., :, None] * np.eye(body.dim)
        margins = tangent_restricted_min(hess, orlicz.gradient(points))
    j = int(np.argmin(margins))
    margin = float(margins[j])

    diagnostics = {
        'interior_min': value, 'argmin_axis': float(argmin_axis), 'argmin_x': argmin_x,
        'boundary_margin': margin, 'worst_boundary_r': float(np.linalg.norm(sample.points[j])),
        'grid_points': float(xs.size), 'boundary_samples': float(margins.size),
    }
    if isinstance(weight, CosWeight):
        diagnostics['beta'] = weight.beta
    return _certificate_report(method, value, margin, grid.tol, diagnostics)


def weight_axis(weight: WeightSpec, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(w_i, w_i', w_i'') of a per-coordinate weight at coordinates x."""
    if isinstance(weight, IdentityWeight):
        x = np.asarray(x, dtype=float)
        return np.ones_like(x), np.zeros_like(x), np.zeros_like(x)
    return weight.w(x), weight.dw(x), weight.d2w(x)


def _certificate_report(method: str, value: float, margin: float, tol: float,
                        diagnostics: Dict[str, float]) -> BoundReport:
    notes = []
    if margin < -tol:
        notes.append(f"boundary condition fails (margin {margin:.3e})")
    if not value > 0.0:
        notes.append(f"interior infimum {value:.6g} is not positive")
    if notes:
        return inapplicable(method, '; '.join(notes), diagnostics=diagnostics)
    return BoundReport(value, method, diagnostics=diagnostics,
                       notes=["numerical certificate checked on grids, not by interval arithmetic"])


def certify_weight(pot: Potential, body: Body, weight: WeightSpec,
                   grid: Optional[GridSpec] = None) -> BoundReport:
    """
    Lower bound on lambda_1 from a diagonal weight W.

    Radial scalar weights need a radial potential; per-coordinate weights
    need an Orlicz body with a uniform or product potential. The identity
    weight works on both.

    Args:
        pot: Potential of the measure
        body: Body containing the origin
        weight: Diagonal weight
        grid: Grid sizes and boundary tolerance

    Returns:
        BoundReport; assumptions_ok when the boundary check passes and the
        interior infimum is positive

    Raises:
        ValueError: If the weight is not positive on the grid
    """
    grid = grid or GridSpec()
    if isinstance(weight, RadialWeight) and isinstance(pot, RadialPotential):
        if not isinstance(body, BallComplement) and (not body.is_convex or not body.is_bounded):
            raise ValueError(f"radial certificates need a convex body or a ball complement, got {body.kind}")
        report = _certify_radial(pot, body, weight, grid)
    elif isinstance(weight, (CosWeight, IdentityWeight)):
        report = _certify_per_coordinate(pot, body, weight, grid)
    else:
        raise ValueError(f"{weight.kind} weight does not apply to a {pot.kind} potential")
    logger.info(f"{report.method} on {body.kind}: {report.value:.10g} (ok={report.assumptions_ok})")
    return report


# ============================================================================
# ALL BOUNDS AT ONCE
# ============================================================================

def _attempt(method: str, fn, *args, **kwargs) -> List[BoundReport]:
    try:
        result = fn(*args, **kwargs)
    except ValueError as e:
        logger.debug(f"{method} not applicable: {e}")
        return [inapplicable(method, str(e))]
    if isinstance(result, tuple):
        return list(result)
    return [result]


def best_bound(pot: Potential, body: Body) -> List[BoundReport]:
    """
    Every bound that applies to (pot, body).

    Certified lower bounds come first, largest first; exact values and upper
    bounds follow, then the methods whose hypotheses failed.
    """
    d = body.dim
    reports: List[BoundReport] = []
    radial = isinstance(pot, RadialPotential)
    uniform = isinstance(pot, Uniform) or (isinstance(pot, Product) and pot.is_uniform())
    bounded = body.is_convex and body.is_bounded

    reports += _attempt('payne_weinberger', payne_weinberger, body, pot)
    reports += _attempt('brascamp_lieb', brascamp_lieb_bound, pot, body)
    if radial and bounded:
        reports += _attempt('corollary_radial', corollary_radial, pot, body)
    if isinstance(pot, RadialPower) and pot.alpha <= 2.0 and bounded:
        rho = rho_min(body, config.BOUNDARY_SAMPLES, config.SEED)
        reports += _attempt('subbotin', subbotin_bound, pot.alpha, d, rho, radii(body)[0])

    if isinstance(body, Ball):
        if radial:
            reports += _attempt('moment_bracket', radial_moment_bracket, pot, body)
        if uniform:
            reports += _attempt('ball_exp_weight', ball_exp_weight_bound, d, body.radius)
            reports += _attempt('optimal_radial_weight', optimal_radial_weight_gap, d, body.radius)
            reports += _attempt('exact_ball_gap', exact_ball_gap, d, body.radius)
    if isinstance(body, Box) and uniform:
        reports += _attempt('exact_box_gap', exact_box_gap, body.half_width)
    if orlicz_view(body) is not None and uniform:
        reports += _attempt('orlicz', orlicz_bound, body)
    if uniform and bounded:
        reports += _attempt('reverse_comparison', reverse_comparison, body)
        reports += _attempt('weinberger', weinberger_upper, body)
    if isinstance(body, BallComplement) and isinstance(pot, RadialPower) and pot.alpha == 2.0:
        reports += _attempt('gaussian_complement', gaussian_complement_bound, d, body.radius)
        reports += _attempt('bcgm', bcgm_bound, d, body.radius)

    lower = [r for r in reports if r.assumptions_ok and r.kind == 'lower']
    others = [r for r in reports if r.assumptions_ok and r.kind != 'lower']
    failed = [r for r in reports if not r.assumptions_ok]
    lower.sort(key=lambda r: (-r.value, r.method))
    others.sort(key=lambda r: (r.kind, r.value, r.method))
    logger.info(f"best_bound on {body.kind} (d={d}): {len(lower)} certified lower bounds, "
                f"{len(failed)} inapplicable")
    return lower + others + failed


def best_certified(reports: List[BoundReport]) -> Optional[BoundReport]:
    """The largest certified lower bound (an exact value counts), or None."""
    usable = [r for r in reports if r.certifies_lower]
    if not usable:
        return None
    return max(usable, key=lambda r: r.value)
