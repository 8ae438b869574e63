import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from transforma.allocation_solver import Allocation
from transforma.economy import Economy
from transforma.errors import Singular
from transforma.numeric_kernel import DenseMatrix, Vector, invert
from transforma.value_system import LaborValues

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NetOutputs:
    g: Vector
    y: Vector
    # (W_j - sum_i K_i c_hat[j, i]) / lambda_j, the value-side formula for y
    y_from_values: Vector

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.y - self.y_from_values)))


@dataclass(frozen=True, eq=False)
class QuantitySystem:
    A_prime: DenseMatrix
    lambda_prime: Optional[Vector]
    g: Vector
    y: Vector
    y_from_values: Vector

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.y - self.y_from_values)))

    def scaled(self, factor: float) -> "QuantitySystem":
        return QuantitySystem(
            A_prime=self.A_prime,
            lambda_prime=self.lambda_prime,
            g=self.g * factor,
            y=self.y * factor,
            y_from_values=self.y_from_values * factor,
        )


def augmented_matrix(e: Economy) -> DenseMatrix:
    """a'_ij = a_ij + v_i l_j: technical coefficients with wage consumption included."""
    return e.A + np.outer(e.v, e.l)


def augmented_values(e: Economy, A_prime: DenseMatrix) -> Vector:
    """l (I - A')^-1; raises Singular for zero-surplus economies."""
    return e.l @ invert(np.eye(e.n) - A_prime)


def outputs(a: Allocation, lv: LaborValues, A_prime: DenseMatrix) -> NetOutputs:
    g = a.W / lv.lam
    y = g - A_prime @ g
    y_from_values = (a.W - a.value_flows.sum(axis=0)) / lv.lam
    result = NetOutputs(g=g, y=y, y_from_values=y_from_values)
    logger.debug("Net outputs: y=%s deviation=%.3g", np.array2string(y, precision=9), result.max_deviation)
    return result


def quantity_system(e: Economy, lv: LaborValues, a: Allocation) -> QuantitySystem:
    A_prime = augmented_matrix(e)
    try:
        lambda_prime: Optional[Vector] = augmented_values(e, A_prime)
    except Singular:
        logger.info("Augmented values undefined: I - A' is singular (no surplus value)")
        lambda_prime = None
    net = outputs(a, lv, A_prime)
    return QuantitySystem(
        A_prime=A_prime,
        lambda_prime=lambda_prime,
        g=net.g,
        y=net.y,
        y_from_values=net.y_from_values,
    )
