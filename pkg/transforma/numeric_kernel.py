"""Small dense linear algebra shared by every solver.

Matrices here are at most a few dozen rows, so everything is plain numpy
with explicit elimination where the pivot threshold matters.
"""
import logging
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from transforma.errors import NoConvergence, Singular, ZeroMatrix

logger = logging.getLogger(__name__)

DenseMatrix = NDArray[np.float64]
Vector = NDArray[np.float64]

PIVOT_RTOL = 1e-12
DEFAULT_EIGEN_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


def as_matrix(a: ArrayLike, square: bool = True) -> DenseMatrix:
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape={m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_vector(b: ArrayLike) -> Vector:
    v = np.array(b, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def _eliminate(a: DenseMatrix, rhs: DenseMatrix, raise_singular: bool) -> Tuple[DenseMatrix, DenseMatrix, int, bool]:
    """Forward elimination with partial pivoting, in place on copies.

    Returns the upper-triangular matrix, the transformed right-hand sides, the
    number of row swaps and whether a pivot fell under the threshold.
    """
    n = a.shape[0]
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    threshold = PIVOT_RTOL * scale
    swaps = 0
    for k in range(n):
        p = int(np.argmax(np.abs(a[k:, k]))) + k
        pivot = a[p, k]
        if scale == 0.0 or abs(pivot) <= threshold:
            if raise_singular:
                raise Singular(f"matrix is singular: pivot {k} magnitude {abs(pivot):.3g}", pivot=float(pivot))
            return a, rhs, swaps, True
        if p != k:
            a[[k, p]] = a[[p, k]]
            rhs[[k, p]] = rhs[[p, k]]
            swaps += 1
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(factors, a[k, k:])
        rhs[k + 1:] -= np.outer(factors, rhs[k])
    return a, rhs, swaps, False


def _back_substitute(u: DenseMatrix, rhs: DenseMatrix) -> DenseMatrix:
    n = u.shape[0]
    x = np.zeros_like(rhs)
    for i in range(n - 1, -1, -1):
        x[i] = (rhs[i] - u[i, i + 1:] @ x[i + 1:]) / u[i, i]
    return x


def solve_linear(a: ArrayLike, b: ArrayLike) -> Vector:
    """Solve A x = b by Gaussian elimination with partial pivoting."""
    m = as_matrix(a)
    rhs = as_vector(b)
    if rhs.shape[0] != m.shape[0]:
        raise ValueError(f"dimension mismatch: A is {m.shape}, b has {rhs.shape[0]} entries")
    u, r, _, _ = _eliminate(m.copy(), rhs.reshape(-1, 1).copy(), raise_singular=True)
    return _back_substitute(u, r).reshape(-1)


def invert(a: ArrayLike) -> DenseMatrix:
    m = as_matrix(a)
    n = m.shape[0]
    u, r, _, _ = _eliminate(m.copy(), np.eye(n), raise_singular=True)
    return _back_substitute(u, r)


def determinant(a: ArrayLike) -> float:
    """Determinant from the pivots; 0.0 when a pivot vanishes."""
    m = as_matrix(a)
    n = m.shape[0]
    if n == 0:
        return 1.0
    u, _, swaps, singular = _eliminate(m.copy(), np.zeros((n, 1)), raise_singular=False)
    if singular:
        return 0.0
    sign = -1.0 if swaps % 2 else 1.0
    return sign * float(np.prod(np.diag(u)))


def perron_bounds(m: ArrayLike) -> Tuple[float, float]:
    """(min row sum, max row sum): bounds on the Perron root of a nonnegative matrix."""
    sums = as_matrix(m).sum(axis=1)
    return float(sums.min()), float(sums.max())


def dominant_eigenpair(
    m: ArrayLike,
    tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Tuple[float, Vector]:
    """Perron root and unit eigenvector of a nonnegative matrix by power iteration.

    Starts from the all-ones vector and stops once successive Rayleigh
    quotients differ by less than `tol` and the residual ||Mx - lx||_inf is
    below `tol` as well.
    """
    mat = as_matrix(m)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if np.any(mat < 0):
        raise ValueError("dominant_eigenpair expects a nonnegative matrix")
    if not np.any(mat):
        raise ZeroMatrix("matrix is identically zero")

    n = mat.shape[0]
    x = np.ones(n) / np.sqrt(n)
    lam_prev = float(x @ mat @ x)
    for it in range(1, max_iter + 1):
        y = mat @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            raise ZeroMatrix("power iteration collapsed to the zero vector (nilpotent matrix)")
        x = y / norm
        lam = float(x @ mat @ x)
        residual = float(np.max(np.abs(mat @ x - lam * x)))
        if abs(lam - lam_prev) < tol and residual <= tol:
            if x[np.argmax(np.abs(x))] < 0:
                x = -x
            logger.debug("Power iteration converged: iterations=%d lambda=%.15g residual=%.3g", it, lam, residual)
            return lam, x
        lam_prev = lam
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations", iterations=max_iter)
