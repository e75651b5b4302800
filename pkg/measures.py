"""
Log-concave probability measures mu ~ exp(-V) on a body.

A potential is either radial (V(x) = v(|x|)) or additive over coordinates
(V(x) = sum v_i(x_i)). The bounds read V', V'' and the Hessian eigenvalues,
and the radial validators read the moments of r^(d-1) exp(-v(r)).
"""

import logging
import math
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from geometry import Ball, BallComplement, Body, ZeroFn, one_dim_from_json, radii
from reports import BoundReport, inapplicable

logger = logging.getLogger(__name__)

CONVEXITY_SAMPLES = 1000
QUAD_REL_TOL = 1e-12
QUAD_LIMIT = 500


class HessianEigs(NamedTuple):
    radial_eig: float
    tangential_eig: float


class Potential:
    """Base class for V in mu ~ exp(-V)."""

    kind = 'potential'
    is_radial = True

    def value(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> Dict[str, Any]:
        return {'kind': self.kind}


class RadialPotential(Potential):
    """V(x) = v(|x|) with v convex and nondecreasing on [0, inf)."""

    def v(self, r):
        raise NotImplementedError

    def dv(self, r):
        raise NotImplementedError

    def d2v(self, r):
        raise NotImplementedError

    def value(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.v(np.linalg.norm(points, axis=1))

    def tangential_limit(self) -> Optional[float]:
        """lim V'(r)/r as r -> 0, or None when it does not exist."""
        return None

    def is_log_concave(self, r_max: float, n: int = CONVEXITY_SAMPLES) -> bool:
        r = np.linspace(r_max / n, r_max, n)
        return bool(np.all(self.d2v(r) >= -1e-12) and np.all(self.dv(r) >= -1e-12))


class Uniform(RadialPotential):
    """V = 0."""

    kind = 'uniform'

    def v(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    dv = v
    d2v = v

    def tangential_limit(self):
        return 0.0


class RadialPower(RadialPotential):
    """Subbotin potential v(r) = r^alpha / alpha, alpha > 1 (alpha = 2 is the Gaussian)."""

    kind = 'radial_power'

    def __init__(self, alpha: float):
        if not alpha > 1.0:
            raise ValueError(f"alpha must be > 1, got {alpha}")
        self.alpha = float(alpha)

    def v(self, r):
        return np.asarray(r, dtype=float) ** self.alpha / self.alpha

    def dv(self, r):
        return np.asarray(r, dtype=float) ** (self.alpha - 1.0)

    def d2v(self, r):
        return (self.alpha - 1.0) * np.asarray(r, dtype=float) ** (self.alpha - 2.0)

    def tangential_limit(self):
        if self.alpha == 2.0:
            return 1.0
        if self.alpha > 2.0:
            return 0.0
        return None

    def to_json(self):
        return {'kind': 'radial_power', 'alpha': self.alpha}


class RadialCustom(RadialPotential):
    """
    Radial potential given by evaluators v, v', v'' on r > 0.

    origin_limit is lim v'(r)/r at r = 0 when the caller knows it.
    """

    kind = 'radial_custom'

    def __init__(self, v: Callable, dv: Callable, d2v: Callable, origin_limit: Optional[float] = None):
        self._v = v
        self._dv = dv
        self._d2v = d2v
        self.origin_limit = origin_limit

    def v(self, r):
        return self._v(np.asarray(r, dtype=float))

    def dv(self, r):
        return self._dv(np.asarray(r, dtype=float))

    def d2v(self, r):
        return self._d2v(np.asarray(r, dtype=float))

    def tangential_limit(self):
        return self.origin_limit


class Product(Potential):
    """V(x) = sum_i v_i(x_i)."""

    kind = 'product'
    is_radial = False

    def __init__(self, factors):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("product potential needs at least one factor")

    @property
    def dim(self) -> int:
        return len(self.factors)

    def value(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dim:
            raise ValueError(f"product potential has {self.dim} factors, points have dimension {points.shape[1]}")
        total = np.zeros(points.shape[0])
        for i, factor in enumerate(self.factors):
            total = total + factor.value(points[:, i])
        return total

    def is_log_concave(self, half_width: float, n: int = CONVEXITY_SAMPLES) -> bool:
        return all(f.is_convex(-half_width, half_width, n) for f in self.factors)

    def is_uniform(self) -> bool:
        return all(isinstance(f, ZeroFn) for f in self.factors)

    def to_json(self):
        return {'kind': 'product', 'factors': [f.to_json() for f in self.factors]}


def potential_from_json(spec: Dict[str, Any], dim: Optional[int] = None) -> Potential:
    """
    Build a potential from {"kind": "uniform"|"radial_power"|"gaussian"|"product", ...}.

    A product given with a single factor and a dim is repeated over all coordinates.
    """
    kind = spec.get('kind')
    if kind == 'uniform':
        return Uniform()
    if kind == 'radial_power':
        return RadialPower(float(spec['alpha']))
    if kind == 'gaussian':
        return RadialPower(2.0)
    if kind == 'product':
        factors = [one_dim_from_json(f) for f in spec['factors']]
        if len(factors) == 1 and dim is not None:
            factors = factors * dim
        return Product(factors)
    raise ValueError(f"Unknown potential kind: {kind!r}")


def _require_radial(pot: Potential) -> RadialPotential:
    if not isinstance(pot, RadialPotential):
        raise ValueError(f"{pot.kind} potential is not radial")
    return pot


def hessian_eigs(pot: Potential, r: float) -> HessianEigs:
    """
    The two eigenvalues (V''(r), V'(r)/r) of the Hessian of a radial potential.

    Raises:
        ValueError: For non-radial potentials, r < 0, or r = 0 where V'(r)/r diverges
    """
    pot = _require_radial(pot)
    if r < 0.0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0.0:
        limit = pot.tangential_limit()
        if limit is None:
            raise ValueError(f"V'(r)/r has no finite limit at r = 0 for {pot.kind}")
        return HessianEigs(limit, limit)
    return HessianEigs(float(pot.d2v(r)), float(pot.dv(r)) / r)


def brascamp_lieb_bound(pot: Potential, body: Body) -> BoundReport:
    """
    inf over the body of the smallest eigenvalue of Hess V.

    Valid on convex bodies when V is uniformly convex there.
    """
    method = 'brascamp_lieb'
    if not body.is_convex or not body.is_bounded:
        return inapplicable(method, f"{body.kind} is not a convex body")

    if isinstance(pot, Product):
        if pot.dim != body.dim:
            raise ValueError(f"product potential has {pot.dim} factors, body has dimension {body.dim}")
        half = body.box_bound()
        xs = np.linspace(-half, half, CONVEXITY_SAMPLES)
        per_axis = [float(np.min(f.second(xs))) for f in pot.factors]
        value = min(per_axis)
        diagnostics = {'half_width': half, 'worst_axis': float(int(np.argmin(per_axis)))}
        if value <= 0.0:
            return inapplicable(method, "product potential is not uniformly convex", diagnostics=diagnostics)
        return BoundReport(value, method, diagnostics=diagnostics)

    pot = _require_radial(pot)
    r_bar, _ = radii(body)
    if isinstance(pot, Uniform):
        return inapplicable(method, "V = 0 is not uniformly convex", diagnostics={'r_bar': r_bar})

    if isinstance(pot, RadialPower) and pot.alpha <= 2.0:
        value = (pot.alpha - 1.0) * r_bar ** (pot.alpha - 2.0)
        return BoundReport(value, method, diagnostics={'r_bar': r_bar, 'argmin_r': r_bar})

    # every convex body here contains the origin
    try:
        origin = min(hessian_eigs(pot, 0.0))
    except ValueError as e:
        return inapplicable(method, f"Hessian of V is undefined at the origin: {e}", diagnostics={'r_bar': r_bar})
    r = np.linspace(r_bar / CONVEXITY_SAMPLES, r_bar, CONVEXITY_SAMPLES)
    smallest = np.minimum(pot.d2v(r), pot.dv(r) / r)
    i = int(np.argmin(smallest))
    value, argmin_r = float(smallest[i]), float(r[i])
    if origin <= value:
        value, argmin_r = float(origin), 0.0
    diagnostics = {'r_bar': r_bar, 'argmin_r': argmin_r}
    if value <= 0.0:
        return inapplicable(method, "potential is not uniformly convex on the body", diagnostics=diagnostics)
    return BoundReport(value, method, diagnostics=diagnostics)


def radial_range(body: Body, r_max: Optional[float] = None) -> Tuple[float, float]:
    """Radial interval covered by a ball or a (truncated) ball complement."""
    if isinstance(body, Ball):
        return 0.0, body.radius
    if isinstance(body, BallComplement):
        if r_max is None or r_max <= body.radius:
            raise ValueError(f"ball complement needs a truncation radius r_max > {body.radius}")
        return body.radius, float(r_max)
    raise ValueError(f"radial moments need a ball or ball complement, got {body.kind}")


def _log_density(pot: RadialPotential, dim: int, k: int, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    with np.errstate(divide='ignore'):
        return (k + dim - 1) * np.log(r) - pot.v(r)


def radial_log_moment(pot: Potential, body: Body, k: int, r_max: Optional[float] = None) -> float:
    """
    log of int r^k r^(d-1) exp(-v(r)) dr over the radial range of the body.

    The integrand is rescaled by its maximum before integrating, so large d
    neither overflows nor underflows.
    """
    pot = _require_radial(pot)
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    a, b = radial_range(body, r_max)
    d = body.dim

    grid = np.unique(np.concatenate([
        np.linspace(a, b, 2001),
        np.geomspace(max(a, 1e-12 * b), b, 400),
    ]))
    grid = grid[grid > 0.0]
    logs = _log_density(pot, d, k, grid)
    peak = float(np.max(logs))
    r_peak = float(grid[int(np.argmax(logs))])

    def integrand(r):
        if r <= 0.0:
            return 0.0
        return math.exp(float(_log_density(pot, d, k, r)) - peak)

    breaks = sorted(set([r_peak] + list(np.geomspace(max(a, 1e-8 * b), b, 12)[:-1])))
    breaks = [x for x in breaks if a < x < b]
    total, err = quad(integrand, a, b, points=breaks or None, epsabs=0.0,
                      epsrel=QUAD_REL_TOL, limit=QUAD_LIMIT)
    logger.debug(f"radial moment k={k}, d={d}: {total:.6g} (err {err:.2g}, log scale {peak:.3f})")
    return peak + math.log(total)


def radial_density_moment(pot: Potential, body: Body, k: int, r_max: Optional[float] = None) -> float:
    """
    int r^k r^(d-1) exp(-v(r)) dr over the body's radial range.

    Args:
        pot: Radial potential
        body: Ball or BallComplement (the latter needs r_max)
        k: Moment order
        r_max: Truncation radius for the ball complement

    Returns:
        The moment
    """
    return math.exp(radial_log_moment(pot, body, k, r_max))


def moment_ratio(pot: Potential, body: Body, r_max: Optional[float] = None) -> float:
    """d * m_0 / m_2, i.e. d mu(B) / int |x|^2 dmu on the radial range."""
    log_m0 = radial_log_moment(pot, body, 0, r_max)
    log_m2 = radial_log_moment(pot, body, 2, r_max)
    return body.dim * math.exp(log_m0 - log_m2)
