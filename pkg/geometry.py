"""
Convex bodies (and the ball-complement obstacle domain) with their boundary
geometry.

Every body is described analytically by a defining function F with
Omega = {F <= 0}, normalized so that |F| is dimensionless; boundary points
are found on rays from the origin by bisection onto F = 0. The quantities
consumed by the bounds are:

- rho(x): smallest eigenvalue of Hess F / |grad F| restricted to the tangent
  hyperplane (the second fundamental form of the boundary)
- r_bar / r_under: largest / smallest distance of the boundary to the origin
- diameter and volume
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.stats import norm, qmc

from special_functions import log_gamma

logger = logging.getLogger(__name__)

# |F(x)| tolerance for boundary membership (F is normalized per body)
MEMBERSHIP_TOL = 1e-10

# Curvature of |x|^p for p < 2 is evaluated no closer than this to the axis
POWER_CLAMP = 1e-12

RAY_BISECTION_STEPS = 200
MC_CHUNK = 100000


# ============================================================================
# ONE-DIMENSIONAL CONVEX FUNCTIONS
# ============================================================================

class OneDimConvexFn:
    """
    A convex function of one variable with its first two derivatives.

    The evaluators take and return numpy arrays. Instances are not mutated
    after construction.
    """

    form = 'custom'

    def __init__(self, u: Callable, du: Callable, d2u: Callable, is_even: bool = False):
        self._u = u
        self._du = du
        self._d2u = d2u
        self.is_even = is_even

    def value(self, x):
        return self._u(np.asarray(x, dtype=float))

    def first(self, x):
        return self._du(np.asarray(x, dtype=float))

    def second(self, x):
        return self._d2u(np.asarray(x, dtype=float))

    def is_convex(self, lo: float, hi: float, n: int = 1001) -> bool:
        """Sampled check u'' >= 0 on [lo, hi]."""
        xs = np.linspace(lo, hi, n)
        return bool(np.all(self.second(xs) >= -1e-12))

    def scaled(self, c: float) -> 'OneDimConvexFn':
        """The function x -> u(x / c)."""
        return OneDimConvexFn(
            lambda x: self.value(x / c),
            lambda x: self.first(x / c) / c,
            lambda x: self.second(x / c) / (c * c),
            self.is_even,
        )

    def to_json(self) -> Dict[str, Any]:
        return {'form': self.form}


class PowerFn(OneDimConvexFn):
    """u(x) = |x / scale|^p."""

    form = 'power'

    def __init__(self, p: float, scale: float = 1.0):
        if p < 1.0:
            raise ValueError(f"power p must be >= 1 for convexity, got {p}")
        if scale <= 0.0:
            raise ValueError(f"power scale must be positive, got {scale}")
        self.p = float(p)
        self.scale = float(scale)
        self.is_even = True

    def value(self, x):
        return np.abs(np.asarray(x, dtype=float) / self.scale) ** self.p

    def first(self, x):
        y = np.asarray(x, dtype=float) / self.scale
        return self.p * np.sign(y) * np.abs(y) ** (self.p - 1.0) / self.scale

    def second(self, x):
        y = np.abs(np.asarray(x, dtype=float) / self.scale)
        if self.p == 1.0:
            return np.zeros_like(y)
        if self.p < 2.0:
            y = np.maximum(y, POWER_CLAMP)
        return self.p * (self.p - 1.0) * y ** (self.p - 2.0) / self.scale ** 2

    def scaled(self, c: float) -> 'PowerFn':
        return PowerFn(self.p, self.scale * c)

    def to_json(self) -> Dict[str, Any]:
        return {'form': 'power', 'p': self.p, 'scale': self.scale}


class AsymPowerFn(OneDimConvexFn):
    """u(x) = |x/scale|^p_plus for x >= 0 and |x/scale|^p_minus for x < 0."""

    form = 'asym_power'

    def __init__(self, p_plus: float, p_minus: float, scale: float = 1.0):
        if p_plus < 1.0 or p_minus < 1.0:
            raise ValueError(f"asym_power exponents must be >= 1, got {p_plus}, {p_minus}")
        if scale <= 0.0:
            raise ValueError(f"asym_power scale must be positive, got {scale}")
        self.p_plus = float(p_plus)
        self.p_minus = float(p_minus)
        self.scale = float(scale)
        self.is_even = self.p_plus == self.p_minus

    def _exponent(self, x):
        return np.where(x >= 0.0, self.p_plus, self.p_minus)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.abs(x / self.scale) ** self._exponent(x)

    def first(self, x):
        x = np.asarray(x, dtype=float)
        p = self._exponent(x)
        y = x / self.scale
        return p * np.sign(y) * np.abs(y) ** (p - 1.0) / self.scale

    def second(self, x):
        x = np.asarray(x, dtype=float)
        p = self._exponent(x)
        y = np.abs(x / self.scale)
        y = np.where(p < 2.0, np.maximum(y, POWER_CLAMP), y)
        return np.where(p == 1.0, 0.0, p * (p - 1.0) * y ** (p - 2.0)) / self.scale ** 2

    def scaled(self, c: float) -> 'AsymPowerFn':
        return AsymPowerFn(self.p_plus, self.p_minus, self.scale * c)

    def to_json(self) -> Dict[str, Any]:
        return {'form': 'asym_power', 'p_plus': self.p_plus, 'p_minus': self.p_minus,
                'scale': self.scale}


class GaussianFn(OneDimConvexFn):
    """u(x) = x^2 / (2 sigma^2)."""

    form = 'gaussian'

    def __init__(self, sigma: float = 1.0):
        if sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.sigma = float(sigma)
        self.is_even = True

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * x * x / self.sigma ** 2

    def first(self, x):
        return np.asarray(x, dtype=float) / self.sigma ** 2

    def second(self, x):
        return np.full_like(np.asarray(x, dtype=float), 1.0 / self.sigma ** 2)

    def scaled(self, c: float) -> 'GaussianFn':
        return GaussianFn(self.sigma * c)

    def to_json(self) -> Dict[str, Any]:
        return {'form': 'gaussian', 'sigma': self.sigma}


class ZeroFn(OneDimConvexFn):
    """u = 0: the factor of a uniformly distributed coordinate."""

    form = 'uniform'

    def __init__(self):
        self.is_even = True

    def value(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    first = value
    second = value

    def scaled(self, c: float) -> 'ZeroFn':
        return self

    def to_json(self) -> Dict[str, Any]:
        return {'form': 'uniform'}


def one_dim_from_json(spec: Dict[str, Any]) -> OneDimConvexFn:
    """Build a one-dimensional function from {"form": ..., params}."""
    form = spec.get('form')
    if form == 'power':
        return PowerFn(spec['p'], spec.get('scale', 1.0))
    if form == 'asym_power':
        return AsymPowerFn(spec['p_plus'], spec['p_minus'], spec.get('scale', 1.0))
    if form == 'gaussian':
        return GaussianFn(spec.get('sigma', 1.0))
    if form == 'uniform':
        return ZeroFn()
    raise ValueError(f"Unknown one-dimensional function form: {form!r}")


# ============================================================================
# BODIES
# ============================================================================

@dataclass(frozen=True)
class BoundaryPoint:
    x: np.ndarray
    eta: np.ndarray
    rho: float


@dataclass(frozen=True)
class BoundarySample:
    """Deterministic boundary sample: points, outer unit normals and rho."""

    points: np.ndarray
    normals: np.ndarray
    rho: np.ndarray


class Body:
    """Base class: Omega = {x : F(x) <= 0} in dimension dim."""

    kind = 'body'
    dim: int
    is_convex = True
    is_bounded = True

    def defining_function(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def boundary_radius(self, directions: np.ndarray) -> np.ndarray:
        """Distance t with F(t u) = 0 along each unit direction u."""
        raise NotImplementedError

    def box_bound(self) -> float:
        """R with Omega inside [-R, R]^d."""
        raise ValueError(f"{self.kind} is unbounded")

    def contains(self, points: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return self.defining_function(np.atleast_2d(points)) <= tol

    def scaled(self, c: float) -> 'Body':
        raise NotImplementedError

    def to_json(self) -> Dict[str, Any]:
        raise NotImplementedError

    def _check_dim(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.dim}")


@dataclass(frozen=True)
class Ball(Body):
    radius: float
    dim: int = 2

    kind = 'ball'

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        self._check_dim()

    def defining_function(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (np.sum(x * x, axis=-1) / self.radius ** 2 - 1.0)

    def gradient(self, x):
        return np.asarray(x, dtype=float) / self.radius ** 2

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.eye(self.dim) / self.radius ** 2, x.shape[:-1] + (self.dim, self.dim))

    def boundary_radius(self, directions):
        return np.full(np.asarray(directions).shape[0], self.radius)

    def box_bound(self):
        return self.radius

    def scaled(self, c):
        return Ball(self.radius * c, self.dim)

    def to_json(self):
        return {'kind': 'ball', 'radius': self.radius, 'dim': self.dim}


@dataclass(frozen=True)
class BallComplement(Body):
    """R^d minus the open ball B(0, R): the Gaussian obstacle domain."""

    radius: float
    dim: int = 2

    kind = 'ball_complement'
    is_convex = False
    is_bounded = False

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        self._check_dim()

    def defining_function(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (1.0 - np.sum(x * x, axis=-1) / self.radius ** 2)

    def gradient(self, x):
        return -np.asarray(x, dtype=float) / self.radius ** 2

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(-np.eye(self.dim) / self.radius ** 2, x.shape[:-1] + (self.dim, self.dim))

    def boundary_radius(self, directions):
        return np.full(np.asarray(directions).shape[0], self.radius)

    def scaled(self, c):
        return BallComplement(self.radius * c, self.dim)

    def to_json(self):
        return {'kind': 'ball_complement', 'radius': self.radius, 'dim': self.dim}


@dataclass(frozen=True)
class Box(Body):
    """The hypercube [-R, R]^d."""

    half_width: float
    dim: int = 2

    kind = 'box'

    def __post_init__(self):
        if self.half_width <= 0.0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        self._check_dim()

    def defining_function(self, x):
        x = np.asarray(x, dtype=float)
        return np.max(np.abs(x), axis=-1) / self.half_width - 1.0

    def gradient(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        k = np.argmax(np.abs(x), axis=-1)
        g = np.zeros_like(x)
        rows = np.arange(x.shape[0])
        g[rows, k] = np.sign(x[rows, k]) / self.half_width
        return g

    def hessian(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.zeros(x.shape + (self.dim,))

    def boundary_radius(self, directions):
        return self.half_width / np.max(np.abs(directions), axis=-1)

    def box_bound(self):
        return self.half_width

    def scaled(self, c):
        return Box(self.half_width * c, self.dim)

    def to_json(self):
        return {'kind': 'box', 'half_width': self.half_width, 'dim': self.dim}


@dataclass(frozen=True)
class Orlicz(Body):
    """Generalized Orlicz body {x : sum_i U_i(x_i) <= 1} inside [-R, R]^d."""

    potentials: Tuple[OneDimConvexFn, ...]
    box_bound_value: float

    kind = 'orlicz'

    def __post_init__(self):
        object.__setattr__(self, 'potentials', tuple(self.potentials))
        if self.box_bound_value <= 0.0:
            raise ValueError(f"box_bound must be positive, got {self.box_bound_value}")
        self._check_dim()
        at_origin = sum(float(u.value(0.0)) for u in self.potentials)
        if at_origin >= 1.0:
            raise ValueError(f"Orlicz body must contain the origin (sum U_i(0) = {at_origin} >= 1)")
        R = self.box_bound_value
        for i, u in enumerate(self.potentials):
            if not u.is_convex(-R, R):
                raise ValueError(f"Orlicz potential {i} is not convex on [-{R}, {R}]")
            if np.any(u.value(np.linspace(-R, R, 201)) < 0.0):
                raise ValueError(f"Orlicz potential {i} takes negative values")
        if not self.contained_in_box():
            raise ValueError(f"Orlicz body is not contained in [-{R}, {R}]^{self.dim}")

    @property
    def dim(self) -> int:
        return len(self.potentials)

    def defining_function(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1])
        for i, u in enumerate(self.potentials):
            total = total + u.value(x[..., i])
        return total - 1.0

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack([u.first(x[..., i]) for i, u in enumerate(self.potentials)], axis=-1)

    def hessian_diagonal(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack([u.second(x[..., i]) for i, u in enumerate(self.potentials)], axis=-1)

    def hessian(self, x):
        diag = self.hessian_diagonal(x)
        return diag[..., :, None] * np.eye(self.dim)

    def box_bound(self):
        return self.box_bound_value

    def boundary_radius(self, directions):
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        lo = np.zeros(directions.shape[0])
        hi = np.full(directions.shape[0], self.box_bound_value * math.sqrt(self.dim))
        for _ in range(60):
            outside = self.defining_function(hi[:, None] * directions) > 0.0
            if np.all(outside):
                break
            hi = np.where(outside, hi, 2.0 * hi)
        else:
            raise ValueError("Orlicz body is not bounded along some sampled ray")
        for _ in range(RAY_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if np.all((mid == lo) | (mid == hi)):
                break
            outside = self.defining_function(mid[:, None] * directions) > 0.0
            hi = np.where(outside, mid, hi)
            lo = np.where(outside, lo, mid)
        return 0.5 * (lo + hi)

    def common_power(self) -> Optional[PowerFn]:
        """The shared PowerFn when every U_i is the same |x/s|^p, else None."""
        first = self.potentials[0]
        if not isinstance(first, PowerFn):
            return None
        for u in self.potentials[1:]:
            if not isinstance(u, PowerFn) or u.p != first.p or u.scale != first.scale:
                return None
        return first

    def is_symmetric(self) -> bool:
        return all(u.is_even for u in self.potentials)

    def contained_in_box(self, n: int = 2001) -> bool:
        """Check Omega inside [-R, R]^d through the extent along each axis."""
        R = self.box_bound_value
        xs = np.linspace(-R, R, n)
        minima = [float(np.min(u.value(xs))) for u in self.potentials]
        for i, u in enumerate(self.potentials):
            budget = 1.0 - (sum(minima) - minima[i])
            if float(u.value(R)) < budget - 1e-12 or float(u.value(-R)) < budget - 1e-12:
                return False
        return True

    def scaled(self, c):
        return Orlicz(tuple(u.scaled(c) for u in self.potentials), self.box_bound_value * c)

    def to_json(self):
        return {'kind': 'orlicz', 'potentials': [u.to_json() for u in self.potentials],
                'box_bound': self.box_bound_value}


@dataclass(frozen=True)
class LpBall(Body):
    """{x : sum |x_i / R|^p <= 1}, evaluated through its Orlicz form."""

    p: float
    radius: float
    dim: int = 2

    kind = 'lp_ball'

    def __post_init__(self):
        if self.p < 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.radius <= 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        self._check_dim()

    @cached_property
    def orlicz(self) -> Orlicz:
        fn = PowerFn(self.p, self.radius)
        return Orlicz(tuple(fn for _ in range(self.dim)), self.radius)

    def defining_function(self, x):
        return self.orlicz.defining_function(x)

    def gradient(self, x):
        return self.orlicz.gradient(x)

    def hessian(self, x):
        return self.orlicz.hessian(x)

    def boundary_radius(self, directions):
        return self.orlicz.boundary_radius(directions)

    def box_bound(self):
        return self.radius

    def scaled(self, c):
        return LpBall(self.p, self.radius * c, self.dim)

    def to_json(self):
        return {'kind': 'lp_ball', 'p': self.p, 'radius': self.radius, 'dim': self.dim}


def body_from_json(spec: Dict[str, Any]) -> Body:
    """
    Build a body from its JSON descriptor.

    Args:
        spec: {"kind": "ball"|"box"|"lp_ball"|"orlicz"|"ball_complement", ...}

    Returns:
        The Body
    """
    kind = spec.get('kind')
    if kind == 'ball':
        return Ball(float(spec['radius']), int(spec.get('dim', 2)))
    if kind == 'box':
        return Box(float(spec['half_width']), int(spec['dim']))
    if kind == 'lp_ball':
        return LpBall(float(spec['p']), float(spec.get('radius', 1.0)), int(spec['dim']))
    if kind == 'orlicz':
        potentials = tuple(one_dim_from_json(u) for u in spec['potentials'])
        return Orlicz(potentials, float(spec['box_bound']))
    if kind == 'ball_complement':
        return BallComplement(float(spec['radius']), int(spec.get('dim', 2)))
    raise ValueError(f"Unknown body kind: {kind!r}")


def orlicz_view(body: Body) -> Optional[Orlicz]:
    if isinstance(body, LpBall):
        return body.orlicz
    if isinstance(body, Orlicz):
        return body
    return None


# ============================================================================
# BOUNDARY GEOMETRY
# ============================================================================

def sphere_directions(dim: int, n: int, seed: int = 0) -> np.ndarray:
    """
    Deterministic low-discrepancy unit directions.

    d = 2 uses scrambled Halton angles; d > 2 maps a scrambled Halton sequence
    through the inverse normal CDF and normalizes.
    """
    if n < 1:
        raise ValueError(f"n_samples must be >= 1, got {n}")
    if dim == 2:
        t = qmc.Halton(d=1, scramble=True, seed=seed).random(n)[:, 0]
        theta = 2.0 * math.pi * t
        return np.column_stack([np.cos(theta), np.sin(theta)])
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(n)
    z = norm.ppf(np.clip(u, 1e-12, 1.0 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def tangent_restricted_min(hess: np.ndarray, grad: np.ndarray) -> np.ndarray:
    # Householder reflection mapping e_k to -sign(eta_k) eta; its remaining
    # columns span the tangent hyperplane.
    n, d = grad.shape
    gnorm = np.linalg.norm(grad, axis=1)
    eta = grad / gnorm[:, None]
    rows = np.arange(n)
    k = np.argmax(np.abs(eta), axis=1)
    sgn = np.where(eta[rows, k] >= 0.0, 1.0, -1.0)
    v = eta.copy()
    v[rows, k] += sgn
    house = np.eye(d)[None, :, :] - 2.0 * v[:, :, None] * v[:, None, :] / np.sum(v * v, axis=1)[:, None, None]
    t = np.einsum('nji,njk,nkl->nil', house, hess, house) / gnorm[:, None, None]
    big = 1.0 + np.max(np.abs(t), axis=(1, 2)) * d
    t[rows, k, :] = 0.0
    t[rows, :, k] = 0.0
    t[rows, k, k] = big
    t = 0.5 * (t + np.transpose(t, (0, 2, 1)))
    return np.linalg.eigvalsh(t)[:, 0]


def rho_values(body: Body, points: np.ndarray) -> np.ndarray:
    """rho at many boundary points (membership is not re-checked)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(body, Ball):
        return np.full(points.shape[0], 1.0 / body.radius)
    if isinstance(body, BallComplement):
        return np.full(points.shape[0], -1.0 / body.radius)
    if isinstance(body, Box):
        return np.zeros(points.shape[0])
    grad = body.gradient(points)
    if np.any(np.linalg.norm(grad, axis=1) == 0.0):
        raise ValueError("degenerate boundary point: grad F = 0")
    return tangent_restricted_min(body.hessian(points), grad)


def rho_at(body: Body, x: Sequence[float]) -> float:
    """
    Smallest eigenvalue of Hess F / |grad F| on the tangent hyperplane at x.

    Args:
        body: The body
        x: A boundary point

    Returns:
        rho(x)

    Raises:
        ValueError: If x is off the boundary or grad F(x) = 0
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != body.dim:
        raise ValueError(f"point has dimension {x.shape[1]}, body has {body.dim}")
    f = float(body.defining_function(x)[0])
    if abs(f) > MEMBERSHIP_TOL:
        raise ValueError(f"point is not on the boundary (|F| = {abs(f):.3e})")
    if isinstance(body, Box):
        on_face = np.sum(np.abs(np.abs(x[0]) - body.half_width) <= MEMBERSHIP_TOL * body.half_width)
        if on_face > 1:
            raise ValueError("rho is not defined on edges of the box")
    if np.linalg.norm(body.gradient(x)) == 0.0:
        raise ValueError("degenerate boundary point: grad F = 0")
    return float(rho_values(body, x)[0])


def boundary_point(body: Body, x: Sequence[float]) -> BoundaryPoint:
    rho = rho_at(body, x)
    x = np.asarray(x, dtype=float)
    g = body.gradient(x.reshape(1, -1))[0]
    return BoundaryPoint(x=x, eta=g / np.linalg.norm(g), rho=rho)


def boundary_samples(body: Body, n: int, seed: int = 0) -> BoundarySample:
    """
    Boundary points on low-discrepancy rays, with normals and rho.

    The 2d axis points are appended to the n sampled rays: for l^p bodies with
    p > 2 the curvature vanishes exactly there.
    """
    eye = np.eye(body.dim)
    directions = np.vstack([sphere_directions(body.dim, n, seed), eye, -eye])
    t = body.boundary_radius(directions)
    points = t[:, None] * directions
    grad = body.gradient(points)
    normals = grad / np.linalg.norm(grad, axis=1, keepdims=True)
    return BoundarySample(points=points, normals=normals, rho=rho_values(body, points))


def rho_min(body: Body, n_samples: int = 4096, seed: int = 0) -> float:
    """
    Infimum of rho over the boundary.

    Closed forms for Ball (1/R), Box (0) and BallComplement (-1/R); sampled
    infimum otherwise. For l^p bodies with p < 2 the infimum sits away from
    the axes, where the sample resolves it.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if isinstance(body, Ball):
        return 1.0 / body.radius
    if isinstance(body, Box):
        return 0.0
    if isinstance(body, BallComplement):
        return -1.0 / body.radius
    sample = boundary_samples(body, n_samples, seed)
    value = float(np.min(sample.rho))
    logger.debug(f"rho_min over {n_samples} samples: {value:.6g}")
    return value


def _ray_radius(body: Body, direction: np.ndarray) -> float:
    direction = direction / np.linalg.norm(direction)
    return float(body.boundary_radius(direction.reshape(1, -1))[0])


def _refine_max_radius(body: Body, start: np.ndarray, sign: float) -> float:
    # sign = +1 maximizes |x| over the boundary, -1 minimizes it
    if body.dim == 2:
        theta0 = math.atan2(start[1], start[0])
        width = 0.05

        def objective(theta):
            return -sign * _ray_radius(body, np.array([math.cos(theta), math.sin(theta)]))

        res = minimize_scalar(objective, bounds=(theta0 - width, theta0 + width),
                              method='bounded', options={'xatol': 1e-12})
        return -sign * float(res.fun)

    def objective(v):
        if np.linalg.norm(v) == 0.0:
            return 0.0
        return -sign * _ray_radius(body, v)

    res = minimize(objective, start, method='Nelder-Mead',
                   options={'xatol': 1e-12, 'fatol': 1e-15, 'maxiter': 4000})
    return -sign * float(res.fun)


def radii(body: Body, n_samples: int = 4096, seed: int = 0) -> Tuple[float, float]:
    """
    (r_bar, r_under): largest and smallest distance from the origin to the boundary.

    Raises:
        ValueError: For unbounded bodies (BallComplement has r_under = R but no r_bar)
    """
    if isinstance(body, Ball):
        return body.radius, body.radius
    if isinstance(body, Box):
        return body.half_width * math.sqrt(body.dim), body.half_width
    if isinstance(body, BallComplement):
        raise ValueError(f"ball complement is unbounded: r_bar is infinite (r_under = {body.radius})")

    orlicz = orlicz_view(body)
    power = orlicz.common_power()
    if power is not None:
        spread = body.dim ** (0.5 - 1.0 / power.p)
        if power.p >= 2.0:
            return power.scale * spread, power.scale
        return power.scale, power.scale * spread

    directions = sphere_directions(body.dim, n_samples, seed)
    t = orlicz.boundary_radius(directions)
    i_max = int(np.argmax(t))
    i_min = int(np.argmin(t))
    r_bar = max(float(t[i_max]), _refine_max_radius(orlicz, directions[i_max], 1.0))
    r_under = min(float(t[i_min]), _refine_max_radius(orlicz, directions[i_min], -1.0))
    return r_bar, r_under


def diameter(body: Body, n_samples: int = 2048, seed: int = 0) -> float:
    """sup |x - y| over the body."""
    if isinstance(body, Ball):
        return 2.0 * body.radius
    if isinstance(body, Box):
        return 2.0 * body.half_width * math.sqrt(body.dim)
    if isinstance(body, BallComplement):
        raise ValueError("ball complement is unbounded: infinite diameter")

    orlicz = orlicz_view(body)
    if orlicz.is_symmetric():
        return 2.0 * radii(orlicz, seed=seed)[0]

    directions = sphere_directions(body.dim, n_samples, seed)
    points = orlicz.boundary_radius(directions)[:, None] * directions
    best = 0.0
    best_pair = (0, 0)
    for start in range(0, points.shape[0], 512):
        block = points[start:start + 512]
        dist = np.linalg.norm(block[:, None, :] - points[None, :, :], axis=-1)
        i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
        if dist[i, j] > best:
            best = float(dist[i, j])
            best_pair = (start + int(i), int(j))

    d = body.dim

    def objective(v):
        a, b = v[:d], v[d:]
        if np.linalg.norm(a) == 0.0 or np.linalg.norm(b) == 0.0:
            return 0.0
        xa = _ray_radius(orlicz, a) * a / np.linalg.norm(a)
        xb = _ray_radius(orlicz, b) * b / np.linalg.norm(b)
        return -float(np.linalg.norm(xa - xb))

    x0 = np.concatenate([directions[best_pair[0]], directions[best_pair[1]]])
    res = minimize(objective, x0, method='Nelder-Mead',
                   options={'xatol': 1e-12, 'fatol': 1e-15, 'maxiter': 8000})
    return max(best, -float(res.fun))


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit d-ball through V_d = 2 pi / d * V_{d-2}."""
    volume = 1.0 if dim % 2 == 0 else 2.0
    for k in range(2 if dim % 2 == 0 else 3, dim + 1, 2):
        volume *= 2.0 * math.pi / k
    return volume


def volume(body: Body, n_samples: int = 200000, seed: int = 0) -> Tuple[float, float]:
    """
    (estimate, std_error) of the volume.

    Closed form for Ball, Box and LpBall; Monte Carlo rejection in the
    bounding box otherwise, deterministic given the seed.
    """
    if isinstance(body, Ball):
        return unit_ball_volume(body.dim) * body.radius ** body.dim, 0.0
    if isinstance(body, Box):
        return (2.0 * body.half_width) ** body.dim, 0.0
    if isinstance(body, LpBall):
        d, p = body.dim, body.p
        log_unit = d * (math.log(2.0) + log_gamma(1.0 + 1.0 / p)) - log_gamma(1.0 + d / p)
        return math.exp(log_unit + d * math.log(body.radius)), 0.0
    if isinstance(body, BallComplement):
        raise ValueError("ball complement is unbounded: infinite volume")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")

    R = body.box_bound()
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = n_samples
    while remaining > 0:
        m = min(MC_CHUNK, remaining)
        points = R * rng.uniform(-1.0, 1.0, size=(m, body.dim))
        hits += int(np.count_nonzero(body.defining_function(points) <= 0.0))
        remaining -= m
    box = (2.0 * R) ** body.dim
    frac = hits / n_samples
    estimate = box * frac
    std_error = box * math.sqrt(frac * (1.0 - frac) / n_samples)
    logger.debug(f"MC volume of {body.kind}: {estimate:.6g} +/- {std_error:.2g} ({n_samples} samples)")
    return estimate, std_error
