"""Labor values, the exploitation rate and the per-unit value decomposition."""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from transforma.economy import Economy, require_validated
from transforma.errors import Singular, TransformaError, WageExceedsValue
from transforma.numeric_kernel import DenseMatrix, Vector, invert

logger = logging.getLogger(__name__)

WAGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LaborValues:
    lam: Vector


@dataclass(frozen=True, eq=False)
class WageStructure:
    lambda_v: float
    e: float  # math.inf when lambda_v == 0
    alpha: Optional[Vector]


@dataclass(frozen=True, eq=False)
class UnitValueTable:
    """Value decomposition for one unit of each commodity.

    c[i, j] is the value of input commodity i used per unit of commodity j,
    variable capital included. The hatted arrays are the same columns divided
    by k_j, so each branch commits exactly one unit of capital.
    """

    c: DenseMatrix
    variable: DenseMatrix
    pl: Vector
    w: Vector
    k: Vector
    c_hat: DenseMatrix
    pl_hat: Vector
    w_hat: Vector

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def k_T_unit(self) -> float:
        return float(self.k.sum())

    @property
    def r_internal(self) -> Vector:
        return self.w_hat - 1.0

    @property
    def variable_hat(self) -> DenseMatrix:
        return self.variable / self.k[np.newaxis, :]

    def unit_capital_in_price(self, x: Vector) -> Vector:
        """k_p,j = sum_i x_i c_ij: per-unit committed capital valued at prices."""
        return x @ self.c

    @classmethod
    def from_columns(cls, c, pl, w, variable=None) -> "UnitValueTable":
        c = np.asarray(c, dtype=np.float64)
        pl = np.asarray(pl, dtype=np.float64)
        w = np.asarray(w, dtype=np.float64)
        variable = np.zeros_like(c) if variable is None else np.asarray(variable, dtype=np.float64)
        c_hat, pl_hat, w_hat = per_capital(c, pl, w)
        return cls(c=c, variable=variable, pl=pl, w=w, k=c.sum(axis=0), c_hat=c_hat, pl_hat=pl_hat, w_hat=w_hat)


def per_capital(c: DenseMatrix, pl: Vector, w: Vector) -> Tuple[DenseMatrix, Vector, Vector]:
    k = c.sum(axis=0)
    if np.any(k <= 0):
        raise TransformaError(f"branch with no committed capital: k={k.tolist()}")
    return c / k[np.newaxis, :], pl / k, w / k


def labor_values(e: Economy) -> LaborValues:
    require_validated(e)
    try:
        inverse = invert(np.eye(e.n) - e.A)
    except Singular as exc:
        raise TransformaError(f"(I - A) singular for a validated economy: {exc}") from exc
    lam = e.l @ inverse
    if np.any(lam <= 0):
        raise TransformaError(f"non-positive labor value: lambda={lam.tolist()}")
    logger.debug("Labor values: lambda=%s", np.array2string(lam, precision=9))
    return LaborValues(lam=lam)


def wage_structure(lv: LaborValues, v) -> WageStructure:
    v = np.asarray(v, dtype=np.float64)
    lambda_v = float(lv.lam @ v)
    if lambda_v > 1.0 + WAGE_TOL:
        raise WageExceedsValue(lambda_v)
    if abs(lambda_v - 1.0) <= WAGE_TOL:
        lambda_v = 1.0
    lambda_v = min(max(lambda_v, 0.0), 1.0)
    if lambda_v == 0.0:
        return WageStructure(lambda_v=0.0, e=float("inf"), alpha=None)
    return WageStructure(
        lambda_v=lambda_v,
        e=(1.0 - lambda_v) / lambda_v,
        alpha=lv.lam * v / lambda_v,
    )


def unit_value_table(e: Economy, lv: LaborValues, ws: WageStructure) -> UnitValueTable:
    lam = lv.lam
    circulating = e.A * lam[:, np.newaxis]
    if ws.lambda_v > 0.0:
        variable = np.outer(lam * e.v, e.l)
    else:
        variable = np.zeros_like(circulating)
    c = circulating + variable
    pl = e.l * (1.0 - ws.lambda_v)
    return UnitValueTable.from_columns(c, pl, lam.copy(), variable=variable)
