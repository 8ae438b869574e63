"""Capital allocation satisfying both fundamental equalities under simple reproduction.

Three routes:
  - solve_direct: one linear solve once r and x* are known (no fixed capital).
  - solve_iterative: scan of the z(q) function with step_k capitals and
    zoomed linear interpolation around its first descending zero.
  - solve_zero_surplus: the degenerate lambda_v = 1 economy, where prices equal
    values and K is the unit-eigenvalue vector of the per-capital input flows.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from transforma.errors import NegativeCapital, NoRoot, SolverNotApplicable
from transforma.numeric_kernel import (
    DEFAULT_EIGEN_TOL,
    DEFAULT_MAX_ITER,
    DenseMatrix,
    Vector,
    determinant,
    dominant_eigenpair,
    solve_linear,
)
from transforma.price_system import PriceEigenSystem
from transforma.value_system import UnitValueTable

logger = logging.getLogger(__name__)

ZERO_SURPLUS_RTOL = 1e-12
DEFAULT_ZOOMS = 6
MAX_SCAN_STEPS = 1_000_000

METHODS = ("direct", "iterative", "zero_surplus")


@dataclass(frozen=True, eq=False)
class Allocation:
    K: Vector
    q_star: float
    x: Vector
    W: Vector
    P: Vector
    PL: Vector
    S: Vector
    K_p: Vector
    z: float
    method: str
    # value_flows[i, j]: value of input j used by branch i; price_flows at prices x
    value_flows: DenseMatrix
    price_flows: DenseMatrix
    wages_value: Vector
    wages_price: Vector
    unit_prices: Vector

    def scaled(self, factor: float) -> "Allocation":
        """Homothetic copy: extensive quantities scale, q*, x and unit prices do not."""
        return Allocation(
            K=self.K * factor,
            q_star=self.q_star,
            x=self.x,
            W=self.W * factor,
            P=self.P * factor,
            PL=self.PL * factor,
            S=self.S * factor,
            K_p=self.K_p * factor,
            z=self.z * factor,
            method=self.method,
            value_flows=self.value_flows * factor,
            price_flows=self.price_flows * factor,
            wages_value=self.wages_value * factor,
            wages_price=self.wages_price * factor,
            unit_prices=self.unit_prices,
        )


@dataclass(frozen=True)
class AllocationResiduals:
    capital_sum: float
    equality_i: float
    equality_ii: float
    reproduction: Tuple[float, ...]
    rate_balance: float
    z: float
    min_capital: float

    @property
    def max_reproduction(self) -> float:
        return max((abs(r) for r in self.reproduction), default=0.0)


def is_zero_surplus(t: UnitValueTable) -> bool:
    return float(t.pl_hat.sum()) < ZERO_SURPLUS_RTOL * float(t.w_hat.sum())


def reproduction_rows(t: UnitValueTable, fully_consumed: Sequence[int]) -> DenseMatrix:
    """One row per fully-consumed commodity k: sum_j K_j c_hat[k, j] - K_k w_hat[k] = 0."""
    rows = np.zeros((len(fully_consumed), t.n))
    for row, k in enumerate(fully_consumed):
        rows[row] = t.c_hat[k]
        rows[row, k] -= t.w_hat[k]
    return rows


def _build_allocation(t: UnitValueTable, x_star: Vector, K: Vector, q: float, method: str) -> Allocation:
    x = q * x_star
    W = K * t.w_hat
    flows_value = K[:, np.newaxis] * t.c_hat.T
    flows_price = flows_value * x[np.newaxis, :]
    K_p = flows_price.sum(axis=1)
    P = x * W
    PL = K * t.pl_hat
    S = P - K_p
    var_hat = t.variable_hat
    return Allocation(
        K=K,
        q_star=q,
        x=x,
        W=W,
        P=P,
        PL=PL,
        S=S,
        K_p=K_p,
        z=float(S.sum() - PL.sum()),
        method=method,
        value_flows=flows_value,
        price_flows=flows_price,
        wages_value=K * var_hat.sum(axis=0),
        wages_price=K * (x @ var_hat),
        unit_prices=x * t.w,
    )


def _require_positive(K: Vector) -> None:
    if np.any(K <= 0):
        raise NegativeCapital(K)


def _require_surplus(t: UnitValueTable) -> None:
    if is_zero_surplus(t):
        raise SolverNotApplicable("economy has no surplus value; use solve_zero_surplus")


def solve_direct(
    t: UnitValueTable,
    ps: PriceEigenSystem,
    K_T: float,
    fully_consumed: Sequence[int],
) -> Allocation:
    _require_surplus(t)
    n = t.n
    system = np.vstack([np.ones(n), t.r_internal, reproduction_rows(t, fully_consumed)])
    rhs = np.concatenate([[K_T, K_T * ps.r], np.zeros(len(fully_consumed))])
    K = solve_linear(system, rhs)
    _require_positive(K)
    u = K * t.w_hat
    q_star = float(u.sum() / (ps.x_star @ u))
    logger.info("Allocation solved: method=direct q_star=%.12g K=%s", q_star, np.array2string(K, precision=9))
    return _build_allocation(t, ps.x_star, K, q_star, "direct")


def solve_zero_surplus(
    t: UnitValueTable,
    K_T: float,
    fully_consumed: Sequence[int],
    tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Allocation:
    if not is_zero_surplus(t):
        raise SolverNotApplicable("economy has positive surplus value; use solve_direct or solve_iterative")
    # K_j w_hat_j = sum_i K_i c_hat[j, i] for every commodity j
    flows = t.c_hat / t.w_hat[:, np.newaxis]
    lam, vec = dominant_eigenpair(flows, tol=tol, max_iter=max_iter)
    if abs(lam - 1.0) > math.sqrt(tol):
        logger.warning("Zero-surplus flow matrix has Perron root %.12g, expected 1", lam)
    K = K_T * vec / vec.sum()
    _require_positive(K)
    logger.info("Allocation solved: method=zero_surplus K=%s", np.array2string(K, precision=9))
    return _build_allocation(t, np.ones(t.n), K, 1.0, "zero_surplus")


def z_value(t: UnitValueTable, K: Vector, q: float, x_star: Vector) -> float:
    """Total profit minus total surplus value for capitals K at price scale q."""
    own = x_star * t.w_hat - t.c_hat.T @ x_star
    return float(q * (K @ own) - K @ t.pl_hat)


def step_k(
    t: UnitValueTable,
    q: float,
    x_star: Vector,
    K_T: float,
    fully_consumed: Sequence[int],
) -> Vector:
    """Capitals meeting the total, equality II at scale q and reproduction; signs unconstrained."""
    rhs = np.concatenate([[K_T, 0.0], np.zeros(len(fully_consumed))])
    return solve_linear(_step_k_matrix(t, q, x_star, fully_consumed), rhs)


def _step_k_matrix(t: UnitValueTable, q: float, x_star: Vector, fully_consumed: Sequence[int]) -> DenseMatrix:
    return np.vstack([np.ones(t.n), t.w_hat * (1.0 - q * x_star), reproduction_rows(t, fully_consumed)])


def step_k_pole(
    t: UnitValueTable,
    x_star: Vector,
    fully_consumed: Sequence[int],
) -> Optional[float]:
    """q at which the step_k system is singular, where z(q) has a pole.

    Only the second row depends on q, linearly, so the determinant is affine in q.
    """
    d0 = determinant(_step_k_matrix(t, 0.0, x_star, fully_consumed))
    d1 = determinant(_step_k_matrix(t, 1.0, x_star, fully_consumed)) - d0
    if d1 == 0.0:
        return None
    return -d0 / d1


def scan_z(
    t: UnitValueTable,
    x_star: Vector,
    K_T: float,
    fully_consumed: Sequence[int],
    grid: Iterable[float],
) -> List[Tuple[float, float]]:
    samples = []
    for q in grid:
        K = step_k(t, q, x_star, K_T, fully_consumed)
        samples.append((float(q), z_value(t, K, q, x_star)))
    return samples


def default_q_step(t: UnitValueTable, x_star: Vector) -> float:
    # q at uniform capitals, a scale estimate for q*
    q_hat = float(t.w_hat.sum() / (x_star @ t.w_hat))
    return q_hat / 100.0


def solve_iterative(
    t: UnitValueTable,
    ps: PriceEigenSystem,
    K_T: float,
    fully_consumed: Sequence[int],
    dq: Optional[float] = None,
    zooms: int = DEFAULT_ZOOMS,
) -> Allocation:
    _require_surplus(t)
    if dq is None:
        dq = default_q_step(t, ps.x_star)
    if not dq > 0:
        raise ValueError(f"dq must be positive, got {dq}")
    if zooms < 1:
        raise ValueError(f"zooms must be >= 1, got {zooms}")

    x_star = ps.x_star

    def z_at(q: float) -> float:
        return z_value(t, step_k(t, q, x_star, K_T, fully_consumed), q, x_star)

    x_min = float(x_star.min())
    q_max = 10.0 * float(t.w_hat.sum()) / x_min if x_min > 0 else math.inf

    q_prev, z_prev = 0.0, z_at(0.0)
    steps = 0
    while True:
        q_cur = q_prev + dq
        steps += 1
        if q_cur > q_max or steps > MAX_SCAN_STEPS:
            pole = step_k_pole(t, x_star, fully_consumed)
            hint = f"; z(q) has a pole at q={pole:.6g}" if pole is not None and pole > 0 else ""
            raise NoRoot(f"z(q) has no descending zero below q_max={q_max:.6g}{hint}", q_last=q_prev)
        z_cur = z_at(q_cur)
        if z_prev > 0.0 >= z_cur:
            logger.debug("Descending sign change: q in [%.12g, %.12g] z=(%.3g, %.3g)", q_prev, q_cur, z_prev, z_cur)
            q_star = _zoom(z_at, q_prev, z_prev, q_cur, z_cur, dq, zooms)
            if q_star is not None:
                break
            logger.debug("Bracket straddles a pole of z(q); scan continues past q=%.12g", q_cur)
        q_prev, z_prev = q_cur, z_cur

    K = step_k(t, q_star, x_star, K_T, fully_consumed)
    _require_positive(K)
    logger.info(
        "Allocation solved: method=iterative q_star=%.12g scan_steps=%d K=%s",
        q_star, steps, np.array2string(K, precision=9),
    )
    return _build_allocation(t, x_star, K, q_star, "iterative")


def _zoom(z_at, lo: float, z_lo: float, hi: float, z_hi: float, dq: float, zooms: int) -> Optional[float]:
    """Rescan [lo, hi] with steps dq/10, dq/100, ... then interpolate linearly.

    Returns None when the interpolated point does not shrink |z|: the bracket
    then surrounds a pole, not a zero.
    """
    step = dq
    for _ in range(zooms):
        if z_hi == 0.0:
            return hi
        step /= 10.0
        q, zq = lo, z_lo
        while q + step < hi:
            q_next = q + step
            z_next = z_at(q_next)
            if z_next <= 0.0:
                hi, z_hi = q_next, z_next
                break
            q, zq = q_next, z_next
        lo, z_lo = q, zq
    q_star = lo - z_lo * (hi - lo) / (z_hi - z_lo)
    if abs(z_at(q_star)) > min(abs(z_lo), abs(z_hi)):
        return None
    return q_star


def solve_allocation(
    t: UnitValueTable,
    ps: PriceEigenSystem,
    K_T: float,
    fully_consumed: Sequence[int],
    method: str = "direct",
    dq: Optional[float] = None,
    zooms: int = DEFAULT_ZOOMS,
    tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Allocation:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if is_zero_surplus(t):
        if method != "zero_surplus":
            logger.warning("No surplus value: rerouting method=%s to zero_surplus", method)
        return solve_zero_surplus(t, K_T, fully_consumed, tol=tol, max_iter=max_iter)
    if method == "iterative":
        return solve_iterative(t, ps, K_T, fully_consumed, dq=dq, zooms=zooms)
    if method == "zero_surplus":
        raise SolverNotApplicable("economy has positive surplus value; zero_surplus solver does not apply")
    return solve_direct(t, ps, K_T, fully_consumed)


def allocation_residuals(
    a: Allocation,
    t: UnitValueTable,
    ps: PriceEigenSystem,
    K_T: float,
    fully_consumed: Sequence[int],
) -> AllocationResiduals:
    reproduction = reproduction_rows(t, fully_consumed) @ a.K
    return AllocationResiduals(
        capital_sum=float(abs(a.K.sum() - K_T)),
        equality_i=float(abs(a.S.sum() - a.PL.sum())),
        equality_ii=float(abs(a.K_p.sum() - a.K.sum())),
        reproduction=tuple(float(r) for r in reproduction),
        rate_balance=float(abs(a.K @ t.r_internal - K_T * ps.r)),
        z=float(abs(a.z)),
        min_capital=float(a.K.min()),
    )
