"""
Small dense and tridiagonal eigensolvers.

- Bisection on the Sturm (inertia) count of a symmetric tridiagonal pencil
  A - lam*M with diagonal M > 0, for the 1D Sturm-Liouville discretizations.
- Cyclic Jacobi rotations for the dense Galerkin matrices.
- Column-ordered Cholesky that drops numerically dependent columns.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular

logger = logging.getLogger(__name__)

PIVMIN = 1e-290
BISECTION_MAX_ITER = 400
JACOBI_MAX_SWEEPS = 60


def pencil_inertia(diag: Sequence[float], off: Sequence[float],
                   mass: Sequence[float], lam: float) -> int:
    """
    Number of eigenvalues of the pencil (A, M) strictly below lam.

    A is symmetric tridiagonal (diagonal diag, off-diagonal off), M = diag(mass).
    Counts the negative pivots of the LDL^T factorization of A - lam*M.
    """
    count = 0
    pivot = diag[0] - lam * mass[0]
    if pivot == 0.0:
        pivot = -PIVMIN
    if pivot < 0.0:
        count += 1
    for i in range(1, len(diag)):
        e = off[i - 1]
        pivot = diag[i] - lam * mass[i] - e * (e / pivot)
        if pivot == 0.0:
            pivot = -PIVMIN
        if pivot < 0.0:
            count += 1
    return count


def pencil_eigenvalue(diag: Sequence[float], off: Sequence[float],
                      mass: Sequence[float], index: int,
                      rel_tol: float = 1e-14) -> float:
    """
    The index-th smallest eigenvalue (0-based) of the tridiagonal pencil.

    Args:
        diag: Diagonal of A, length n
        off: Off-diagonal of A, length n - 1
        mass: Positive diagonal of M, length n
        index: Which eigenvalue, 0 for the smallest
        rel_tol: Relative width of the final bisection bracket

    Returns:
        The eigenvalue
    """
    n = len(diag)
    if len(off) != n - 1 or len(mass) != n:
        raise ValueError("pencil arrays have inconsistent lengths")
    if not 0 <= index < n:
        raise ValueError(f"eigenvalue index {index} out of range for size {n}")

    diag = [float(v) for v in diag]
    off = [float(v) for v in off]
    mass = [float(v) for v in mass]

    lo = 0.0
    step = 1.0
    while pencil_inertia(diag, off, mass, lo) > index:
        lo -= step
        step *= 2.0
    hi = 1.0
    while pencil_inertia(diag, off, mass, hi) <= index:
        hi *= 2.0
        if hi > 1e300:
            raise RuntimeError("could not bracket the pencil eigenvalue")

    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= rel_tol * max(abs(hi), abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if pencil_inertia(diag, off, mass, mid) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """
    Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Returns:
        Eigenvalues sorted ascending
    """
    a = np.array(matrix, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("jacobi_eigenvalues needs a square matrix")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy()

    total = math.sqrt(float(np.sum(a * a)))
    if total == 0.0:
        return np.zeros(n)

    for sweep in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(a.diagonal() ** 2)), 0.0))
        if off <= tol * total:
            logger.debug(f"Jacobi converged after {sweep} sweeps (n={n})")
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        logger.warning(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (n={n})")

    return np.sort(a.diagonal())


def reduced_cholesky(matrix: np.ndarray, rel_tol: float = 1e-11) -> Tuple[np.ndarray, List[int]]:
    """
    Cholesky factor of the largest well-conditioned leading column subset.

    Columns are visited in order; a column whose remaining pivot is below
    rel_tol times its diagonal entry is dropped. Nested column orderings give
    nested selections.

    Returns:
        (L, kept) with matrix[kept][:, kept] = L @ L.T
    """
    b = np.asarray(matrix, dtype=float)
    n = b.shape[0]
    kept: List[int] = []
    factor = np.zeros((0, 0))
    for j in range(n):
        bjj = b[j, j]
        if bjj <= 0.0:
            continue
        if kept:
            y = solve_triangular(factor, b[kept, j], lower=True)
            residual = bjj - float(y @ y)
        else:
            y = np.zeros(0)
            residual = bjj
        if residual <= rel_tol * bjj:
            logger.debug(f"Dropping dependent column {j} (residual ratio {residual / bjj:.3e})")
            continue
        k = len(kept)
        grown = np.zeros((k + 1, k + 1))
        grown[:k, :k] = factor
        grown[k, :k] = y
        grown[k, k] = math.sqrt(residual)
        factor = grown
        kept.append(j)
    return factor, kept
