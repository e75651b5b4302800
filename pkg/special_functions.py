"""
Special functions behind the exact ball gap.

Gamma through a Lanczos approximation, Bessel functions of the first kind
through their power series (with Miller's backward recurrence for large
arguments), and the first positive zero of d/du[u^(1-nu) J_nu(u)], which
fixes the Neumann gap of the ball.
"""

import logging
import math
from typing import List

logger = logging.getLogger(__name__)

# Lanczos approximation, g = 7, nine terms
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# Past this argument Gamma is evaluated through its logarithm
GAMMA_DIRECT_MAX = 120.0

SERIES_MAX_TERMS = 600

# Root search for the Neumann condition
ROOT_GRID_START = 1e-3
ROOT_GRID_STEP = 0.1
ROOT_REL_TOL = 1e-13
NEWTON_STEPS = 2


def _lanczos_sum(z: float) -> float:
    total = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        total += LANCZOS_COEFFS[i] / (z + i)
    return total


def log_gamma(x: float) -> float:
    """Natural logarithm of Gamma(x) for x > 0."""
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def gamma(x: float) -> float:
    """
    Gamma function for x > 0.

    Direct Lanczos evaluation on [0.5, 120], the recurrence
    Gamma(x) = Gamma(x + 1)/x below 0.5 and the logarithmic form above 120.
    """
    if x <= 0.0:
        raise ValueError(f"gamma requires x > 0, got {x}")
    if x < 0.5:
        return gamma(x + 1.0) / x
    if x > GAMMA_DIRECT_MAX:
        return math.exp(log_gamma(x))
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)


def bessel_series_scaled(nu: float, u: float) -> float:
    """
    Scaled Bessel series S_nu(u) = sum_k (-u^2/4)^k / (k! (nu+1)_k).

    J_nu(u) = (u/2)^nu / Gamma(nu+1) * S_nu(u). The scaled form never
    underflows at large order, which is what the root search needs.
    """
    if nu < 0.0:
        raise ValueError(f"order must be >= 0, got {nu}")
    q = -0.25 * u * u
    term = 1.0
    terms: List[float] = [term]
    largest = 1.0
    for k in range(1, SERIES_MAX_TERMS):
        term *= q / (k * (nu + k))
        terms.append(term)
        largest = max(largest, abs(term))
        if abs(term) < 1e-17 * largest and k > 0.5 * abs(u):
            break
    else:
        logger.warning(f"Bessel series for nu={nu}, u={u} hit {SERIES_MAX_TERMS} terms")
    return math.fsum(terms)


def _series_prefactor(nu: float, u: float) -> float:
    if nu == 0.0:
        return 1.0
    return math.exp(nu * math.log(0.5 * u) - log_gamma(nu + 1.0))


def _bessel_miller(nu: float, u: float) -> float:
    # Backward recurrence J_{v-1} = (2v/u) J_v - J_{v+1} from a high order,
    # normalized with (u/2)^mu / Gamma(mu+1) = sum_k c_k J_{mu+2k}(u).
    m = int(math.floor(nu))
    mu = nu - m
    top = max(m, int(u)) + 20 + int(math.sqrt(40.0 * max(m, u)))

    weights = [1.0]
    a_k = 1.0
    for k in range(1, top // 2 + 1):
        if k > 1:
            a_k *= (mu + k - 1) / k
        weights.append((mu + 2 * k) * a_k)

    t_next = 0.0
    t_cur = 1e-30
    norm = 0.0
    target = 0.0
    for n in range(top, 0, -1):
        if n == m:
            target = t_cur
        if n % 2 == 0:
            norm += weights[n // 2] * t_cur
        t_prev = (2.0 * (mu + n) / u) * t_cur - t_next
        t_next, t_cur = t_cur, t_prev
        if abs(t_cur) > 1e250:
            t_cur *= 1e-250
            t_next *= 1e-250
            norm *= 1e-250
            target *= 1e-250
    if m == 0:
        target = t_cur
    norm += weights[0] * t_cur
    return target * _series_prefactor(mu, u) / norm


def bessel_j(nu: float, u: float) -> float:
    """
    Bessel function of the first kind J_nu(u) for nu >= 0, u >= 0.

    Args:
        nu: Order
        u: Argument

    Returns:
        J_nu(u), relative accuracy about 1e-12
    """
    if nu < 0.0:
        raise ValueError(f"bessel_j requires nu >= 0, got {nu}")
    if u < 0.0:
        raise ValueError(f"bessel_j requires u >= 0, got {u}")
    if u == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if u <= max(12.0, 2.0 * nu):
        return _series_prefactor(nu, u) * bessel_series_scaled(nu, u)
    return _bessel_miller(nu, u)


def _neumann_condition(order: float, u: float) -> float:
    # u^(1-order) J_order(u) has derivative proportional to J_order(u) - u J_{order+1}(u)
    return (bessel_series_scaled(order, u)
            - u * u / (2.0 * (order + 1.0)) * bessel_series_scaled(order + 1.0, u))


def _neumann_condition_derivative(order: float, u: float) -> float:
    return (-1.5 * u / (order + 1.0) * bessel_series_scaled(order + 1.0, u)
            + u ** 3 / (4.0 * (order + 1.0) * (order + 2.0)) * bessel_series_scaled(order + 2.0, u))


def neumann_root(order: float) -> float:
    """
    First positive zero of d/du[u^(1-order) J_order(u)].

    order = d/2 gives the Neumann gap p^2/R^2 of the d-ball; order = d/2 - 1
    gives the best radial weight.

    Raises:
        RuntimeError: If no sign change is found on the search grid
    """
    if order < 0.0:
        raise ValueError(f"order must be >= 0, got {order}")

    u_max = math.sqrt(2.0 * order + 2.0) + 10.0
    a = ROOT_GRID_START
    fa = _neumann_condition(order, a)
    b = a
    fb = fa
    while fb > 0.0:
        a, fa = b, fb
        b = a + ROOT_GRID_STEP
        if b > u_max:
            raise RuntimeError(f"No root bracket for order {order} below u = {u_max:.3f}")
        fb = _neumann_condition(order, b)
    logger.debug(f"Neumann root for order {order} bracketed in [{a:.3f}, {b:.3f}]")

    while b - a > ROOT_REL_TOL * b:
        mid = 0.5 * (a + b)
        fm = _neumann_condition(order, mid)
        if fm > 0.0:
            a = mid
        else:
            b = mid

    root = 0.5 * (a + b)
    for _ in range(NEWTON_STEPS):
        slope = _neumann_condition_derivative(order, root)
        if slope == 0.0:
            break
        step = _neumann_condition(order, root) / slope
        candidate = root - step
        # Newton may only polish, never leave the bracket
        if abs(step) > 10.0 * (b - a) + 1e-15 * root:
            break
        root = candidate
    return root
