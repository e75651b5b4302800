"""
Numerical reference values for the spectral gap.

- Radial measures: the gap splits over spherical-harmonic sectors; sectors
  l = 0 and l = 1 are one-dimensional Sturm-Liouville problems in the weight
  m(r) = r^(d-1) exp(-v(r)), discretized in flux form (lumped linear finite
  elements) and solved by Sturm-count bisection, with Richardson
  extrapolation over the meshes n and 2n.
- Product measures on boxes: the gap is the smallest one-dimensional gap.
- Anything bounded: Rayleigh-Galerkin on monomials gives an upper bound.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular

import config
from eigensolvers import jacobi_eigenvalues, pencil_eigenvalue, reduced_cholesky
from geometry import Ball, BallComplement, Body, Box, ZeroFn
from measures import Potential, Product, RadialPotential, Uniform, radial_log_moment
from special_functions import log_gamma

logger = logging.getLogger(__name__)

SECTORS = ('l0', 'l1')
# Weights below exp(-LOG_WEIGHT_FLOOR) of the peak are cut off the radial range
LOG_WEIGHT_FLOOR = 300.0
TRIM_GRID_N = 10000
MESH_GRADING = 1.5
MIN_NODES = 32
TRUNCATION_REL_TOL = 1e-4
SECTOR_REL_TOL = 1e-6
GALERKIN_QUAD_NODES = 200
MC_BATCHES = 10


# ============================================================================
# STURM-LIOUVILLE
# ============================================================================

@dataclass(frozen=True)
class SturmProblem:
    """
    -(m u')' / m + [l = 1] (d-1)/r^2 u = lambda u on [r_min, r_max].

    The l = 1 sector vanishes at the origin when r_min = 0; every other end
    carries the Neumann condition. In the l = 0 sector the constant mode is
    skipped.
    """

    d: int
    pot: Potential
    r_min: float
    r_max: float
    sector: str = 'l1'
    n: int = config.STURM_N
    grading: float = MESH_GRADING

    def __post_init__(self):
        if not isinstance(self.pot, RadialPotential):
            raise ValueError(f"{self.pot.kind} potential is not radial")
        if self.sector not in SECTORS:
            raise ValueError(f"sector must be one of {SECTORS}, got {self.sector!r}")
        if self.n < MIN_NODES:
            raise ValueError(f"n must be >= {MIN_NODES}, got {self.n}")
        if not self.r_max > self.r_min >= 0.0:
            raise ValueError(f"need r_max > r_min >= 0, got [{self.r_min}, {self.r_max}]")

    def log_weight(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide='ignore'):
            return (self.d - 1.0) * np.log(r) - self.pot.v(r)

    def potential_term(self) -> Optional[Callable]:
        if self.sector == 'l0':
            return None
        return lambda r: (self.d - 1.0) / (r * r)

    @property
    def index(self) -> int:
        return 1 if self.sector == 'l0' else 0


@dataclass(frozen=True)
class SturmResult:
    value: float
    coarse: float
    fine: float
    n: int
    r_lo: float
    r_hi: float


def trimmed_range(log_weight: Callable, a: float, b: float) -> Tuple[float, float]:
    """Sub-interval of [a, b] where the weight is within exp(-300) of its maximum."""
    pre = np.linspace(a, b, TRIM_GRID_N + 1)
    logs = log_weight(pre)
    peak = float(np.max(logs))
    kept = np.nonzero(logs >= peak - LOG_WEIGHT_FLOOR)[0]
    lo = pre[kept[0] - 1] if kept[0] > 0 else a
    hi = pre[kept[-1] + 1] if kept[-1] < TRIM_GRID_N else b
    if lo > a or hi < b:
        logger.debug(f"radial range [{a:.6g}, {b:.6g}] trimmed to [{lo:.6g}, {hi:.6g}]")
    return float(lo), float(hi)


def _mesh(a: float, b: float, n: int, grading: float) -> np.ndarray:
    if a == 0.0:
        return b * (np.arange(n + 1) / n) ** grading
    return np.linspace(a, b, n + 1)


def _pencil_value(log_weight: Callable, q: Optional[Callable], nodes: np.ndarray,
                  dirichlet_left: bool, index: int) -> float:
    h = np.diff(nodes)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    left_q = nodes[:-1] + 0.25 * h
    right_q = nodes[1:] - 0.25 * h

    peak = max(float(np.max(log_weight(mid))), float(np.max(log_weight(left_q))),
               float(np.max(log_weight(right_q))))

    def m(r):
        return np.exp(log_weight(r) - peak)

    stiff = m(mid) / h
    m_left = 0.5 * h * m(left_q)
    m_right = 0.5 * h * m(right_q)

    mass = np.zeros(nodes.size)
    mass[:-1] += m_left
    mass[1:] += m_right
    diag = np.zeros(nodes.size)
    diag[:-1] += stiff
    diag[1:] += stiff
    if q is not None:
        diag[:-1] += m_left * q(left_q)
        diag[1:] += m_right * q(right_q)
    off = -stiff

    if dirichlet_left:
        diag, off, mass = diag[1:], off[1:], mass[1:]
    return pencil_eigenvalue(diag, off, mass, index)


def sturm_eigenvalue(problem: SturmProblem, n: Optional[int] = None) -> float:
    """The sector eigenvalue on a single mesh of n elements."""
    n = n or problem.n
    lo, hi = trimmed_range(problem.log_weight, problem.r_min, problem.r_max)
    nodes = _mesh(lo, hi, n, problem.grading)
    dirichlet = problem.sector == 'l1' and lo == 0.0
    return _pencil_value(problem.log_weight, problem.potential_term(), nodes, dirichlet, problem.index)


def solve_sturm(problem: SturmProblem) -> SturmResult:
    """
    Solve on n and 2n elements and extrapolate, lambda = (4 lambda_2n - lambda_n) / 3.
    """
    lo, hi = trimmed_range(problem.log_weight, problem.r_min, problem.r_max)
    coarse = sturm_eigenvalue(problem, problem.n)
    fine = sturm_eigenvalue(problem, 2 * problem.n)
    value = (4.0 * fine - coarse) / 3.0
    logger.debug(f"Sturm {problem.sector} d={problem.d}: n={problem.n} {coarse:.12g}, "
                 f"2n {fine:.12g}, extrapolated {value:.12g}")
    return SturmResult(value, coarse, fine, problem.n, lo, hi)


def sturm_gap(problem: SturmProblem) -> float:
    """Smallest eigenvalue (l1) or smallest nonzero eigenvalue (l0) of the sector problem."""
    return solve_sturm(problem).value


# ============================================================================
# RADIAL AND PRODUCT GAPS
# ============================================================================

@dataclass(frozen=True)
class RadialGapResult:
    value: float
    l0: float
    l1: float
    sector: str
    r_max: float
    doubled: Optional[float] = None


def default_truncation(body: BallComplement) -> float:
    return body.radius + 10.0 + 3.0 * math.sqrt(body.dim)


def _sector_pair(pot: Potential, d: int, a: float, b: float, n: int) -> Tuple[float, float]:
    l0 = sturm_gap(SturmProblem(d, pot, a, b, 'l0', n))
    l1 = sturm_gap(SturmProblem(d, pot, a, b, 'l1', n))
    return l0, l1


def radial_gap_report(pot: Potential, body: Body, n: Optional[int] = None,
                      r_max_trunc: Optional[float] = None) -> RadialGapResult:
    """
    Gap of a radial measure on a ball or ball complement from sectors l = 0, 1.

    For the ball complement the range is [R, r_max_trunc] and the value must
    not move by 1e-4 (relative) when the truncation radius doubles.

    Raises:
        RuntimeError: If the truncation has not converged
    """
    n = n or config.STURM_N
    d = body.dim
    if isinstance(body, Ball):
        l0, l1 = _sector_pair(pot, d, 0.0, body.radius, n)
        value = min(l0, l1)
        return RadialGapResult(value, l0, l1, 'l1' if l1 <= l0 else 'l0', body.radius)

    if not isinstance(body, BallComplement):
        raise ValueError(f"radial_gap needs a ball or ball complement, got {body.kind}")
    trunc = r_max_trunc or default_truncation(body)
    if trunc <= body.radius:
        raise ValueError(f"truncation radius {trunc} must exceed R = {body.radius}")
    l0, l1 = _sector_pair(pot, d, body.radius, trunc, n)
    value = min(l0, l1)
    doubled = min(_sector_pair(pot, d, body.radius, 2.0 * trunc, n))
    if abs(doubled - value) > TRUNCATION_REL_TOL * abs(value):
        raise RuntimeError(f"truncation at r = {trunc:.6g} has not converged: "
                           f"{value:.12g} vs {doubled:.12g} at r = {2.0 * trunc:.6g}")
    sector = 'l1' if l1 <= l0 else 'l0'
    logger.info(f"radial gap on {body.kind} (d={d}): {value:.12g}, sector {sector} wins")
    return RadialGapResult(value, l0, l1, sector, trunc, doubled)


def radial_gap(pot: Potential, body: Body, n: Optional[int] = None,
               r_max_trunc: Optional[float] = None) -> float:
    """Numerical gap of a radial measure on a ball or ball complement."""
    return radial_gap_report(pot, body, n, r_max_trunc).value


def line_gap(factor, R: float, n: Optional[int] = None) -> float:
    """Neumann gap of exp(-v) dx on [-R, R], extrapolated over n and 2n."""
    n = n or config.STURM_N

    def log_weight(x):
        return -factor.value(np.asarray(x, dtype=float))

    lo, hi = trimmed_range(log_weight, -R, R)
    coarse = _pencil_value(log_weight, None, np.linspace(lo, hi, n + 1), False, 1)
    fine = _pencil_value(log_weight, None, np.linspace(lo, hi, 2 * n + 1), False, 1)
    return (4.0 * fine - coarse) / 3.0


def product_gap(pot: Potential, body: Box, n: Optional[int] = None) -> float:
    """
    Gap of a product measure on a box: the smallest one-dimensional gap.

    The uniform potential counts as the product of zero factors.
    """
    if not isinstance(body, Box):
        raise ValueError(f"product_gap needs a box, got {body.kind}")
    if isinstance(pot, Uniform):
        factors = [ZeroFn()] * body.dim
    elif isinstance(pot, Product):
        if pot.dim != body.dim:
            raise ValueError(f"product potential has {pot.dim} factors, box has dimension {body.dim}")
        factors = list(pot.factors)
    else:
        raise ValueError(f"product_gap needs a product or uniform potential, got {pot.kind}")

    gaps: Dict[str, float] = {}
    for factor in factors:
        key = repr(factor.to_json())
        if key not in gaps:
            gaps[key] = line_gap(factor, body.half_width, n)
    value = min(gaps.values())
    logger.info(f"product gap on box (d={body.dim}): {value:.12g}")
    return value


# ============================================================================
# RAYLEIGH-GALERKIN
# ============================================================================

@dataclass(frozen=True)
class GalerkinProblem:
    """
    Rayleigh-Galerkin setup. A ball complement is accepted with r_max, and
    then stands for the annulus R <= |x| <= r_max with a Neumann outer end.
    """

    body: Body
    pot: Potential
    degree: int = config.GALERKIN_DEGREE
    mc_samples: int = config.MC_SAMPLES
    seed: int = config.SEED
    r_max: Optional[float] = None

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if isinstance(self.body, BallComplement) and self.r_max is not None:
            if not isinstance(self.pot, RadialPotential):
                raise ValueError(f"annulus Galerkin needs a radial potential, got {self.pot.kind}")
            if self.r_max <= self.body.radius:
                raise ValueError(f"r_max must exceed R = {self.body.radius}, got {self.r_max}")
        elif not self.body.is_bounded:
            raise ValueError(f"Galerkin needs a bounded body, got {self.body.kind}")


@dataclass(frozen=True)
class GalerkinResult:
    value: float
    std_error: float
    basis_size: int
    kept: int
    moments: str
    notes: List[str] = field(default_factory=list)


def monomial_exponents(dim: int, degree: int) -> List[Tuple[int, ...]]:
    """Exponents of all monomials of total degree 1..degree, grouped by degree."""
    result = []
    for total in range(1, degree + 1):
        level = [e for e in itertools.product(range(total + 1), repeat=dim) if sum(e) == total]
        result.extend(sorted(level, reverse=True))
    return result


def sphere_moment(alpha: Sequence[int]) -> float:
    """E[theta^alpha] for theta uniform on the unit sphere S^(d-1)."""
    if any(a % 2 for a in alpha):
        return 0.0
    d = len(alpha)
    total = sum(alpha)
    log_value = (log_gamma(d / 2.0) + sum(log_gamma((a + 1.0) / 2.0) for a in alpha)
                 - 0.5 * d * math.log(math.pi) - log_gamma((total + d) / 2.0))
    return math.exp(log_value)


def _radial_moments(problem: GalerkinProblem, scale: float) -> Callable:
    body, pot = problem.body, problem.pot
    d = body.dim
    if isinstance(body, Ball) and isinstance(pot, Uniform):
        def radial(k):
            return d / (k + d)
    else:
        log_m0 = radial_log_moment(pot, body, 0, problem.r_max)

        @lru_cache(maxsize=None)
        def radial(k):
            return math.exp(radial_log_moment(pot, body, k, problem.r_max) - log_m0 - k * math.log(scale))

    def moment(alpha):
        s = sphere_moment(alpha)
        return 0.0 if s == 0.0 else s * radial(sum(alpha))
    return moment


def _annulus_scale(problem: GalerkinProblem) -> float:
    """Root mean square radius, so the monomials stay of order one on the mass."""
    log_m0 = radial_log_moment(problem.pot, problem.body, 0, problem.r_max)
    log_m2 = radial_log_moment(problem.pot, problem.body, 2, problem.r_max)
    return math.exp(0.5 * (log_m2 - log_m0))


def _box_moments(problem: GalerkinProblem) -> Callable:
    body, pot = problem.body, problem.pot
    R = body.half_width
    nodes, weights = np.polynomial.legendre.leggauss(GALERKIN_QUAD_NODES)
    if isinstance(pot, Uniform):
        factors = [ZeroFn()] * body.dim
    else:
        factors = list(pot.factors)
    axis_weights = []
    for f in factors:
        logs = -f.value(R * nodes)
        w = weights * np.exp(logs - np.max(logs))
        axis_weights.append(w / np.sum(w))

    def moment(alpha):
        return float(np.prod([np.sum(axis_weights[i] * nodes ** a) for i, a in enumerate(alpha)]))
    return moment


def _sample(problem: GalerkinProblem) -> Tuple[np.ndarray, np.ndarray]:
    body = problem.body
    R = body.box_bound()
    rng = np.random.default_rng(problem.seed)
    points = R * rng.uniform(-1.0, 1.0, size=(problem.mc_samples, body.dim))
    points = points[body.contains(points, tol=0.0)]
    logs = -problem.pot.value(points)
    w = np.exp(logs - np.max(logs))
    return points / R, w


def _mc_moments(y: np.ndarray, w: np.ndarray, max_power: int) -> Callable:
    powers = y[:, :, None] ** np.arange(max_power + 1)[None, None, :]
    total = float(np.sum(w))

    @lru_cache(maxsize=None)
    def moment(alpha):
        values = w.copy()
        for i, a in enumerate(alpha):
            if a:
                values = values * powers[:, i, a]
        return float(np.sum(values)) / total
    return moment


def _rayleigh_ritz(moment: Callable, exponents: List[Tuple[int, ...]],
                   scale: float) -> Tuple[float, int]:
    k = len(exponents)
    dim = len(exponents[0])
    means = np.array([moment(e) for e in exponents])
    A = np.zeros((k, k))
    B = np.zeros((k, k))
    for j in range(k):
        for l in range(j, k):
            ej, el = exponents[j], exponents[l]
            summed = tuple(a + b for a, b in zip(ej, el))
            B[j, l] = B[l, j] = moment(summed) - means[j] * means[l]
            grad = 0.0
            for i in range(dim):
                if ej[i] and el[i]:
                    lowered = list(summed)
                    lowered[i] -= 2
                    grad += ej[i] * el[i] * moment(tuple(lowered))
            A[j, l] = A[l, j] = grad / scale ** 2
    factor, kept = reduced_cholesky(B)
    if not kept:
        raise RuntimeError("Galerkin basis is empty after removing dependent functions")
    if len(kept) < k:
        logger.warning(f"Galerkin basis pruned from {k} to {len(kept)} functions")
    inner = solve_triangular(factor, A[np.ix_(kept, kept)], lower=True)
    reduced = solve_triangular(factor, inner.T, lower=True)
    return float(jacobi_eigenvalues(reduced)[0]), len(kept)


def galerkin_upper_report(problem: GalerkinProblem) -> GalerkinResult:
    """
    Smallest generalized eigenvalue of (E[grad phi_j . grad phi_k], Cov(phi_j, phi_k)).

    Monomials are taken in x / s (s the body's box bound or radius). Moments
    are exact on balls and truncated ball complements with radial measures
    and on boxes with product measures; other bodies use a seeded Monte Carlo
    sample, with a batch means standard error.
    """
    body, pot = problem.body, problem.pot
    exponents = monomial_exponents(body.dim, problem.degree)
    notes: List[str] = []

    if isinstance(body, Ball) and isinstance(pot, RadialPotential):
        value, kept = _rayleigh_ritz(_radial_moments(problem, body.radius), exponents, body.radius)
        result = GalerkinResult(value, 0.0, len(exponents), kept, 'exact', notes)
    elif isinstance(body, BallComplement):
        scale = _annulus_scale(problem)
        value, kept = _rayleigh_ritz(_radial_moments(problem, scale), exponents, scale)
        notes.append(f"annulus {body.radius:g} <= |x| <= {problem.r_max:g}")
        result = GalerkinResult(value, 0.0, len(exponents), kept, 'quadrature', notes)
    elif isinstance(body, Box) and (isinstance(pot, (Uniform, Product))):
        if isinstance(pot, Product) and pot.dim != body.dim:
            raise ValueError(f"product potential has {pot.dim} factors, box has dimension {body.dim}")
        value, kept = _rayleigh_ritz(_box_moments(problem), exponents, body.half_width)
        result = GalerkinResult(value, 0.0, len(exponents), kept, 'quadrature', notes)
    else:
        y, w = _sample(problem)
        scale = body.box_bound()
        max_power = 2 * problem.degree
        value, kept = _rayleigh_ritz(_mc_moments(y, w, max_power), exponents, scale)
        batches = []
        for chunk in np.array_split(np.arange(y.shape[0]), MC_BATCHES):
            batches.append(_rayleigh_ritz(_mc_moments(y[chunk], w[chunk], max_power), exponents, scale)[0])
        std_error = float(np.std(batches, ddof=1) / math.sqrt(MC_BATCHES))
        notes.append(f"Monte Carlo moments from {y.shape[0]} accepted samples (seed {problem.seed})")
        result = GalerkinResult(value, std_error, len(exponents), kept, 'monte_carlo', notes)

    logger.info(f"Galerkin upper bound on {body.kind} (degree {problem.degree}): "
                f"{result.value:.12g} (+/- {result.std_error:.2g})")
    return result


def galerkin_upper(problem: GalerkinProblem) -> float:
    """Rayleigh-Galerkin upper bound on lambda_1."""
    return galerkin_upper_report(problem).value


@dataclass(frozen=True)
class SectorCheck:
    galerkin: float
    radial: float
    consistent: bool
    domain: str = 'disk'
    r_max: Optional[float] = None


def sector_consistency(pot: Potential, body: Body, degree: int = config.GALERKIN_DEGREE,
                       r_max_trunc: Optional[float] = None) -> SectorCheck:
    """
    Check that sectors l >= 2 do not go below the l = 0, 1 minimum.

    Runs in the plane with the same radius: on the disk for a ball, on the
    annulus R <= |x| <= r_max for a ball complement (r_max defaults to the
    radial truncation radius). A degree-7 Galerkin basis contains the
    l = 2, 3 harmonics, so a Galerkin value below the radial minimum means a
    higher sector wins.
    """
    if isinstance(body, Ball):
        planar = Ball(body.radius, 2)
        galerkin = galerkin_upper(GalerkinProblem(planar, pot, degree))
        radial = radial_gap(pot, planar)
        domain, r_max = 'disk', None
    elif isinstance(body, BallComplement):
        planar = BallComplement(body.radius, 2)
        r_max = r_max_trunc or default_truncation(planar)
        galerkin = galerkin_upper(GalerkinProblem(planar, pot, degree, r_max=r_max))
        radial = radial_gap(pot, planar, r_max_trunc=r_max)
        domain = 'annulus'
    else:
        raise ValueError(f"sector check needs a ball or ball complement, got {body.kind}")
    consistent = galerkin >= radial * (1.0 - SECTOR_REL_TOL)
    if not consistent:
        logger.error(f"higher sector undercuts the radial gap on the {domain}: "
                     f"Galerkin {galerkin:.12g} < {radial:.12g}")
    return SectorCheck(galerkin, radial, consistent, domain, r_max)
