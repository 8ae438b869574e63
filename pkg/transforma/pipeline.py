import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from transforma.allocation_solver import (
    Allocation,
    is_zero_surplus,
    solve_allocation,
)
from transforma.economy import Economy, validate
from transforma.errors import NegativeCapital, NoRoot
from transforma.price_system import (
    PriceEigenSystem,
    SimilarityReport,
    augmented_similarity_check,
    build_share_matrix,
    profit_rate,
)
from transforma.quantity_system import QuantitySystem, quantity_system
from transforma.settings import Settings
from transforma.value_system import (
    LaborValues,
    UnitValueTable,
    WageStructure,
    labor_values,
    unit_value_table,
    wage_structure,
)

SOLVERS = ("direct", "iterative", "both")


@dataclass(frozen=True, eq=False)
class Solution:
    economy: Economy
    K_T: float
    labor_values: LaborValues
    wages: WageStructure
    table: UnitValueTable
    prices: PriceEigenSystem
    similarity: SimilarityReport
    allocation: Allocation
    quantities: QuantitySystem
    solver: str
    alternate: Optional[Allocation] = None
    # set when solver="both" and the iterative pass found no root
    alternate_error: Optional[str] = None
    notices: List[str] = field(default_factory=list)

    @property
    def zero_surplus(self) -> bool:
        return self.allocation.method == "zero_surplus"

    def cross_solver_deviation(self) -> Optional[float]:
        """Largest relative gap between the two solvers on q*, K and x."""
        if self.alternate is None:
            return None
        a, b = self.allocation, self.alternate

        def rel(u, v) -> float:
            u, v = np.atleast_1d(u), np.atleast_1d(v)
            return float(np.max(np.abs(u - v) / np.maximum(np.abs(u), 1e-300)))

        return max(rel(a.q_star, b.q_star), rel(a.K, b.K), rel(a.x, b.x))

    def rescaled(self, total_capital: float) -> "Solution":
        """Homothetic copy of this solution for another total capital."""
        if not total_capital > 0:
            raise ValueError(f"total capital must be positive, got {total_capital}")
        factor = total_capital / self.K_T
        return replace(
            self,
            K_T=total_capital,
            allocation=self.allocation.scaled(factor),
            alternate=self.alternate.scaled(factor) if self.alternate is not None else None,
            quantities=self.quantities.scaled(factor),
            notices=self.notices + [f"rescaled from K_T={self.K_T:.9g} to K_T={total_capital:.9g}"],
        )


class TransformationPipeline:
    """Runs an economy from labor values through prices, allocation and quantities."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings.from_env()
        self.logger = logging.getLogger(__name__)

    def solve(
        self,
        economy: Economy,
        solver: str = "direct",
        dq: Optional[float] = None,
        zooms: int = 6,
    ) -> Solution:
        if solver not in SOLVERS:
            raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
        s = self.settings
        notices: List[str] = []

        e = economy if economy.validated else validate(economy)
        lv = labor_values(e)
        ws = wage_structure(lv, e.v)
        table = unit_value_table(e, lv, ws)
        ps = profit_rate(build_share_matrix(table), tol=s.eigen_tol, max_iter=s.max_iter)
        similarity = augmented_similarity_check(e, lv, ps.M, eigen_tol=s.eigen_tol, max_iter=s.max_iter)

        K_T = e.K_T if e.K_T is not None else table.k_T_unit
        if e.K_T is None:
            notices.append(f"K_T=auto resolved to total per-unit capital {K_T:.9g}")

        alternate = None
        alternate_error = None
        if is_zero_surplus(table):
            notices.append("no surplus value: solver rerouted to zero_surplus (prices equal values)")
            allocation = solve_allocation(
                table, ps, K_T, e.fully_consumed, method="zero_surplus", tol=s.eigen_tol, max_iter=s.max_iter
            )
        else:
            primary = "iterative" if solver == "iterative" else "direct"
            allocation = solve_allocation(table, ps, K_T, e.fully_consumed, method=primary, dq=dq, zooms=zooms)
            if solver == "both":
                try:
                    alternate = solve_allocation(
                        table, ps, K_T, e.fully_consumed, method="iterative", dq=dq, zooms=zooms
                    )
                except (NoRoot, NegativeCapital) as exc:
                    alternate_error = f"{exc.__class__.__name__}: {exc}"
                    notices.append(f"iterative solver failed: {alternate_error}")

        quantities = quantity_system(e, lv, allocation)
        solution = Solution(
            economy=e,
            K_T=K_T,
            labor_values=lv,
            wages=ws,
            table=table,
            prices=ps,
            similarity=similarity,
            allocation=allocation,
            quantities=quantities,
            solver=allocation.method,
            alternate=alternate,
            alternate_error=alternate_error,
            notices=notices,
        )
        for notice in notices:
            self.logger.info("Notice: %s", notice)
        if alternate is not None:
            self.logger.info("Cross-solver deviation: %.3g", solution.cross_solver_deviation())
        return solution
