"""
Upper bounds on total Sobol indices from derivative-based sensitivity measures.

For inputs distributed as mu on Omega, the Poincare inequality
Var_mu(g) <= (1/lambda_1) E_mu|grad g|^2 applied to the part of f that
depends on x_i gives

    S_i^total <= nu_i / (lambda_1 Var f),    nu_i = E[(d_i f)^2].

A certified lower bound on lambda_1 therefore yields a certified (up to
sampling error) upper bound on every total index.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from geometry import Body, Box, ZeroFn
from measures import Potential, Product, Uniform
from reports import BoundReport, json_float

logger = logging.getLogger(__name__)

# Rows outside the body above this fraction reject the whole sample set
MAX_REJECTED_FRACTION = 1e-3
CSV_CHUNKSIZE = 100000


@dataclass(frozen=True)
class SampleSet:
    """Rows (x, f(x), grad f(x)) drawn from mu."""

    x: np.ndarray
    f: np.ndarray
    grad: np.ndarray
    provenance: str = ''
    rejected: int = 0

    @property
    def n(self) -> int:
        return int(self.f.size)

    @property
    def dim(self) -> int:
        return int(self.x.shape[1])

    @classmethod
    def from_arrays(cls, x, f, grad, body: Optional[Body] = None, provenance: str = '',
                    check_rejected: bool = True) -> 'SampleSet':
        """
        Validate shapes and, when a body is given, membership of every row.

        check_rejected=False drops outside rows without the fraction check (a
        file chunk, checked against the whole file later).

        Raises:
            ValueError: On inconsistent shapes, non-finite values or more than
                0.1% of the rows outside the body
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        f = np.asarray(f, dtype=float).reshape(-1)
        grad = np.atleast_2d(np.asarray(grad, dtype=float))
        if x.shape[0] != f.size or grad.shape != x.shape:
            raise ValueError(f"inconsistent sample shapes: x {x.shape}, f {f.shape}, grad {grad.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f)) and np.all(np.isfinite(grad))):
            raise ValueError("samples contain non-finite values")

        rejected = 0
        if body is not None:
            if body.dim != x.shape[1]:
                raise ValueError(f"samples have dimension {x.shape[1]}, body has {body.dim}")
            inside = body.contains(x)
            rejected = int(np.count_nonzero(~inside))
            if check_rejected:
                _check_rejected(rejected, x.shape[0], body)
            if rejected:
                logger.warning(f"Dropping {rejected} sample rows outside the {body.kind}")
                x, f, grad = x[inside], f[inside], grad[inside]
        return cls(x, f, grad, provenance, rejected)


def _check_rejected(rejected: int, rows: int, body: Body):
    if rejected > MAX_REJECTED_FRACTION * rows:
        raise ValueError(f"{rejected} of {rows} sample rows lie outside the {body.kind} "
                         f"(more than {MAX_REJECTED_FRACTION:.1%})")


@dataclass(frozen=True)
class SampleTotals:
    """
    First-pass sums over the rows: count, mean and centered sum of squares of
    f, column sums of (d_i f)^2. Totals of disjoint chunks merge.
    """

    n: int
    mean: float
    m2: float
    sq_sum: np.ndarray
    rejected: int = 0

    @classmethod
    def of(cls, samples: SampleSet) -> 'SampleTotals':
        mean = float(np.mean(samples.f)) if samples.n else 0.0
        return cls(samples.n, mean, float(np.sum((samples.f - mean) ** 2)),
                   np.sum(samples.grad ** 2, axis=0), samples.rejected)

    def merge(self, other: 'SampleTotals') -> 'SampleTotals':
        n = self.n + other.n
        if n == 0:
            return SampleTotals(0, 0.0, 0.0, self.sq_sum + other.sq_sum, self.rejected + other.rejected)
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return SampleTotals(n, mean, m2, self.sq_sum + other.sq_sum, self.rejected + other.rejected)

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1.0)

    @property
    def dgsm(self) -> np.ndarray:
        return self.sq_sum / self.n


def accumulate(chunks: Iterable[SampleSet]) -> SampleTotals:
    totals = None
    for chunk in chunks:
        part = SampleTotals.of(chunk)
        totals = part if totals is None else totals.merge(part)
    if totals is None or totals.n == 0:
        raise ValueError("no sample rows")
    return totals


def _columns(header: Sequence[str]) -> int:
    names = [c.strip() for c in header]
    xs = [c for c in names if re.fullmatch(r'x\d+', c)]
    d = len(xs)
    expected = [f"x{i}" for i in range(1, d + 1)] + ['f'] + [f"g{i}" for i in range(1, d + 1)]
    if d == 0 or names != expected:
        raise ValueError(f"CSV header must be x1..xd,f,g1..gd, got {','.join(names)}")
    return d


class SampleFile:
    """
    A UTF-8, comma-separated sample file with header x1..xd,f,g1..gd.

    The file is read in chunks and never held in memory as a whole: the
    constructor makes the first pass (header, finiteness, membership and the
    totals) and every estimate makes one more pass for its jackknife errors.
    """

    def __init__(self, path: str, body: Optional[Body] = None, chunksize: int = CSV_CHUNKSIZE):
        self.path = str(path)
        self.body = body
        self.chunksize = chunksize
        try:
            self.totals = accumulate(self.chunks())
        except ValueError as e:
            raise ValueError(f"{self.path}: {e}")
        if body is not None:
            _check_rejected(self.totals.rejected, self.totals.n + self.totals.rejected, body)
        logger.info(f"Scanned {self.n} samples (d={self.dim}) from {self.path}")

    @property
    def n(self) -> int:
        return self.totals.n

    @property
    def dim(self) -> int:
        return int(self.totals.sq_sum.size)

    @property
    def provenance(self) -> str:
        return self.path

    def chunks(self) -> Iterator[SampleSet]:
        d = None
        for chunk in pd.read_csv(self.path, chunksize=self.chunksize, encoding='utf-8', sep=',', decimal='.'):
            if d is None:
                d = _columns(chunk.columns)
            values = chunk.to_numpy(dtype=float)
            yield SampleSet.from_arrays(values[:, :d], values[:, d], values[:, d + 1:], body=self.body,
                                        provenance=self.path, check_rejected=False)


Samples = Union[SampleSet, SampleFile]


def _passes(samples: Samples) -> Tuple[SampleTotals, Callable[[], Iterable[SampleSet]]]:
    if isinstance(samples, SampleFile):
        return samples.totals, samples.chunks
    return SampleTotals.of(samples), lambda: [samples]


@dataclass(frozen=True)
class DgsmEstimate:
    variance_hat: float
    variance_se: float
    dgsm: np.ndarray
    dgsm_se: np.ndarray


class _JackknifeSums:
    """Sums of leave-one-out deviations from the full-sample value."""

    def __init__(self, center: np.ndarray):
        self.center = np.asarray(center, dtype=float)
        self.s1 = np.zeros_like(self.center)
        self.s2 = np.zeros_like(self.center)

    def add(self, leave_one_out: np.ndarray):
        dev = leave_one_out - self.center[None, :]
        self.s1 = self.s1 + np.sum(dev, axis=0)
        self.s2 = self.s2 + np.sum(dev * dev, axis=0)

    def se(self, n: int) -> np.ndarray:
        spread = np.maximum(self.s2 - self.s1 * self.s1 / n, 0.0)
        return np.sqrt((n - 1.0) / n * spread)


def _leave_one_out(chunk: SampleSet, totals: SampleTotals):
    # Leave-one-out variance of f and means of (d_i f)^2, one row per left-out sample of the chunk
    n = totals.n
    fc = chunk.f - totals.mean
    loo_mean = -fc / (n - 1.0)
    loo_var = ((totals.m2 - fc * fc) - (n - 1.0) * loo_mean ** 2) / (n - 2.0)
    loo_dgsm = (totals.sq_sum[None, :] - chunk.grad ** 2) / (n - 1.0)
    return loo_var, loo_dgsm


def _jackknife(chunks: Iterable[SampleSet], totals: SampleTotals,
               lam_values: Optional[np.ndarray] = None) -> Dict[str, np.ndarray]:
    sums = {'variance': _JackknifeSums([totals.variance]), 'dgsm': _JackknifeSums(totals.dgsm)}
    if lam_values is not None:
        sums['upper'] = _JackknifeSums(totals.dgsm / (lam_values * totals.variance))
    seen = 0
    for chunk in chunks:
        loo_var, loo_dgsm = _leave_one_out(chunk, totals)
        sums['variance'].add(loo_var[:, None])
        sums['dgsm'].add(loo_dgsm)
        if lam_values is not None:
            with np.errstate(divide='ignore', invalid='ignore'):
                sums['upper'].add(loo_dgsm / (lam_values[None, :] * loo_var[:, None]))
        seen += chunk.n
    if seen != totals.n:
        raise ValueError(f"sample rows changed between passes: {totals.n}, then {seen}")
    return {name: s.se(totals.n) for name, s in sums.items()}


def estimate_dgsm(samples: Samples) -> DgsmEstimate:
    """
    nu_i = mean of (d_i f)^2 and the unbiased variance of f, with jackknife errors.

    Raises:
        ValueError: With fewer than two rows
    """
    totals, rows = _passes(samples)
    n = totals.n
    if n < 2:
        raise ValueError(f"need at least 2 sample rows, got {n}")
    if n < 3:
        return DgsmEstimate(totals.variance, math.nan, totals.dgsm, np.full(totals.dgsm.shape, math.nan))
    se = _jackknife(rows(), totals)
    return DgsmEstimate(totals.variance, float(se['variance'][0]), totals.dgsm, se['dgsm'])


@dataclass
class GsaReport:
    variance_hat: float
    variance_se: float
    dgsm: List[float]
    dgsm_se: List[float]
    sobol_upper: List[float]
    sobol_upper_se: List[float]
    lambda_used: List[BoundReport]
    lambda_scope: str
    n: int
    provenance: str = ''
    notes: List[str] = field(default_factory=list)

    @property
    def uninformative(self) -> List[bool]:
        return [s > 1.0 for s in self.sobol_upper]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'variance_hat': json_float(self.variance_hat),
            'variance_se': json_float(self.variance_se),
            'dgsm': [json_float(v) for v in self.dgsm],
            'dgsm_se': [json_float(v) for v in self.dgsm_se],
            'sobol_upper': [json_float(v) for v in self.sobol_upper],
            'sobol_upper_se': [json_float(v) for v in self.sobol_upper_se],
            'uninformative': self.uninformative,
            'lambda_scope': self.lambda_scope,
            'lambda_used': [r.to_dict() for r in self.lambda_used],
            'n': self.n,
            'provenance': self.provenance,
            'notes': list(self.notes),
        }


def _lambda_values(lam: Union[BoundReport, Sequence[BoundReport]], dim: int):
    if isinstance(lam, BoundReport):
        reports, scope = [lam], 'domain'
    else:
        reports, scope = list(lam), 'per_input'
        if len(reports) != dim:
            raise ValueError(f"need one per-input bound for each of the {dim} inputs, got {len(reports)}")
    for r in reports:
        if not r.certifies_lower or not r.value > 0.0:
            raise ValueError(f"{r.method} is not a usable lower bound on the gap "
                             f"(kind={r.kind}, value={r.value}, assumptions_ok={r.assumptions_ok})")
    values = np.array([r.value for r in reports] * (dim if scope == 'domain' else 1))
    return values, reports, scope


def sobol_upper_bound(samples: Samples, lam: Union[BoundReport, Sequence[BoundReport]]) -> GsaReport:
    """
    S_i^upper = nu_i / (lambda * Var f).

    Args:
        samples: An in-memory SampleSet or a SampleFile read chunk by chunk
        lam: A domain-level lower bound on lambda_1, or one bound per input
            (one-dimensional Poincare constants of independent inputs)

    Returns:
        GsaReport; entries above 1 are valid but carry no information

    Raises:
        ValueError: If a bound is not a certified lower bound, or Var f = 0
    """
    lam_values, reports, scope = _lambda_values(lam, samples.dim)
    totals, rows = _passes(samples)
    if totals.n < 2:
        raise ValueError(f"need at least 2 sample rows, got {totals.n}")
    if not totals.variance > 0.0:
        raise ValueError("sample variance of f is zero: Sobol indices are undefined")

    upper = totals.dgsm / (lam_values * totals.variance)
    if totals.n >= 3:
        se = _jackknife(rows(), totals, lam_values)
        variance_se, dgsm_se, upper_se = float(se['variance'][0]), se['dgsm'], se['upper']
    else:
        variance_se = math.nan
        dgsm_se = upper_se = np.full(upper.shape, math.nan)

    notes = []
    wide = [i + 1 for i, s in enumerate(upper) if s > 1.0]
    if wide:
        notes.append(f"upper bounds above 1 (uninformative) for inputs {wide}")
        logger.warning(f"Sobol upper bounds exceed 1 for inputs {wide}")
    return GsaReport(
        variance_hat=totals.variance, variance_se=variance_se,
        dgsm=totals.dgsm.tolist(), dgsm_se=dgsm_se.tolist(),
        sobol_upper=upper.tolist(), sobol_upper_se=upper_se.tolist(),
        lambda_used=reports, lambda_scope=scope, n=totals.n,
        provenance=samples.provenance, notes=notes,
    )


def per_input_bounds(pot: Potential, body: Body, n: int = 1000) -> List[BoundReport]:
    """
    One-dimensional gap lower bounds for independent inputs on a box.

    Input i has density ~ exp(-v_i) on [-R, R]; with v_i convex its gap is at
    least max(pi^2 / (2R)^2, min v_i'').

    Raises:
        ValueError: Unless the body is a box and the potential is uniform or a
            product of convex factors
    """
    if not isinstance(body, Box):
        raise ValueError(f"per-input bounds need independent inputs on a box, got {body.kind}")
    if isinstance(pot, Uniform):
        factors = [ZeroFn()] * body.dim
    elif isinstance(pot, Product) and pot.dim == body.dim:
        factors = list(pot.factors)
    else:
        raise ValueError(f"per-input bounds need a product potential, got {pot.kind}")

    R = body.half_width
    t = np.linspace(-R, R, n)
    reports = []
    for i, factor in enumerate(factors):
        if not factor.is_convex(-R, R, n):
            raise ValueError(f"factor {i + 1} ({factor.form}) is not convex on [-{R}, {R}]")
        segment = math.pi ** 2 / (4.0 * R * R)
        curvature = float(np.min(factor.second(t)))
        if curvature > segment:
            reports.append(BoundReport(curvature, 'brascamp_lieb_1d', diagnostics={'input': float(i + 1)}))
        else:
            reports.append(BoundReport(segment, 'payne_weinberger_1d', diagnostics={'input': float(i + 1)}))
    return reports
