import logging
from dataclasses import dataclass

import numpy as np

from transforma.economy import Economy
from transforma.errors import ZeroOutputValue
from transforma.numeric_kernel import (
    DEFAULT_EIGEN_TOL,
    DEFAULT_MAX_ITER,
    DenseMatrix,
    Vector,
    dominant_eigenpair,
)
from transforma.value_system import LaborValues, UnitValueTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PriceEigenSystem:
    """Perron pair of the input-share matrix.

    M[j, i] = c[i, j] / w[j]: row j is the producing branch, column i the input.
    """

    M: DenseMatrix
    lam: float
    r: float
    x_star: Vector


@dataclass(frozen=True)
class SimilarityReport:
    max_deviation: float
    lambda_share: float
    lambda_augmented: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return (
            self.max_deviation <= self.tolerance
            and abs(self.lambda_share - self.lambda_augmented) <= self.tolerance
        )


def share_matrix(c: DenseMatrix, w: Vector) -> DenseMatrix:
    w = np.asarray(w, dtype=np.float64)
    if np.any(w <= 0):
        bad = [j + 1 for j in np.flatnonzero(w <= 0)]
        raise ZeroOutputValue(f"zero output value in branches {bad}")
    return np.asarray(c, dtype=np.float64).T / w[:, np.newaxis]


def build_share_matrix(t: UnitValueTable) -> DenseMatrix:
    return share_matrix(t.c, t.w)


def profit_rate(
    M: DenseMatrix,
    tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> PriceEigenSystem:
    lam, x_star = dominant_eigenpair(M, tol=tol, max_iter=max_iter)
    r = 1.0 / lam - 1.0
    if -tol < r < 0.0:
        r = 0.0
    logger.info("Profit rate found: lambda=%.12g r=%.12g", lam, r)
    return PriceEigenSystem(M=np.asarray(M, dtype=np.float64), lam=lam, r=r, x_star=x_star)


def augmented_similarity_check(
    e: Economy,
    lv: LaborValues,
    M: DenseMatrix,
    tolerance: float = 1e-9,
    eigen_tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SimilarityReport:
    """Check M = D^-1 (A + v.l)^T D with D = diag(lambda); both Perron roots are reported."""
    d = lv.lam
    augmented = e.A + np.outer(e.v, e.l)
    similar = augmented.T * d[np.newaxis, :] / d[:, np.newaxis]
    deviation = float(np.max(np.abs(similar - M)))
    lam_share, _ = dominant_eigenpair(M, tol=eigen_tol, max_iter=max_iter)
    lam_aug, _ = dominant_eigenpair(augmented, tol=eigen_tol, max_iter=max_iter)
    report = SimilarityReport(
        max_deviation=deviation,
        lambda_share=lam_share,
        lambda_augmented=lam_aug,
        tolerance=tolerance,
    )
    if not report.ok:
        logger.warning(
            "Similarity check failed: deviation=%.3g lambda_M=%.12g lambda_A'=%.12g",
            deviation, lam_share, lam_aug,
        )
    return report
