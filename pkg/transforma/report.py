"""Report tables, invariant diagnostics and their text/CSV rendering."""
import io
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from transforma.allocation_solver import allocation_residuals
from transforma.pipeline import Solution

TOTAL = "Total"
TABLE_ORDER = ("unit_values", "values", "prices", "summary", "quantities", "diagnostics")
TITLES = {
    "unit_values": "Value table for the production of one unit of each commodity",
    "values": "Distribution consistent with social need (values)",
    "prices": "Distribution at production prices",
    "summary": "Profit rate, transformation coefficients and capitals",
    "quantities": "Physical quantities",
    "diagnostics": "Invariant diagnostics",
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass(frozen=True, eq=False)
class SolveReport:
    header: Dict[str, str]
    tables: Dict[str, pd.DataFrame]
    checks: List[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _with_totals(df: pd.DataFrame, columns: Optional[List[str]] = None) -> pd.DataFrame:
    totals = df.sum(axis=0, numeric_only=True)
    if columns is not None:
        totals = totals.where(totals.index.isin(columns))
    return pd.concat([df, totals.to_frame(TOTAL).T])


def solution_checks(sol: Solution, tol: float) -> List[CheckResult]:
    t, ps, a, q = sol.table, sol.prices, sol.allocation, sol.quantities
    fc = sol.economy.fully_consumed
    res = allocation_residuals(a, t, ps, sol.K_T, fc)
    pl_total = float(a.PL.sum())
    eq_i_tol = tol * pl_total if pl_total > 0 else 1e-10
    scale = max(1.0, sol.K_T)
    eigen_residual = float(np.max(np.abs(ps.M @ ps.x_star - ps.lam * ps.x_star)))

    checks = [
        CheckResult("capital_sum", res.capital_sum, 1e-9 * sol.K_T),
        CheckResult("equality_i_profit_eq_surplus", res.equality_i, eq_i_tol),
        CheckResult("equality_ii_capital_price_eq_value", res.equality_ii, tol * sol.K_T),
        CheckResult("rate_balance_sum_Kr_eq_KT_r", res.rate_balance, tol * sol.K_T),
        CheckResult("eigen_residual", eigen_residual, tol),
        CheckResult("similarity_M_vs_augmented", sol.similarity.max_deviation, 1e-9),
        CheckResult("perron_root_M_vs_augmented",
                    abs(sol.similarity.lambda_share - sol.similarity.lambda_augmented), 1e-9),
        CheckResult("capital_nonnegative", max(0.0, -res.min_capital), 0.0),
        CheckResult("net_output_formulas_agree", q.max_deviation, tol * scale),
        CheckResult("net_output_nonnegative", max(0.0, -float(q.y.min())), 1e-9 * scale),
    ]
    for k, r in zip(fc, res.reproduction):
        label = sol.economy.branch_labels[k]
        checks.append(CheckResult(f"reproduction_value_{label}", abs(r), tol * scale))
        checks.append(CheckResult(f"reproduction_net_output_{label}", abs(float(q.y[k])), tol * scale))
    if sol.zero_surplus:
        checks.append(CheckResult("prices_equal_values", float(np.max(np.abs(a.x - 1.0))), 1e-10))
    if sol.alternate is not None:
        checks.append(CheckResult("cross_solver_agreement", sol.cross_solver_deviation(), 1e-6))
    elif sol.alternate_error is not None:
        checks.append(CheckResult("cross_solver_agreement", math.inf, 1e-6))
    return checks


def build_report(sol: Solution, tol: float) -> SolveReport:
    e, lv, ws, t, ps, a, q = (
        sol.economy, sol.labor_values, sol.wages, sol.table, sol.prices, sol.allocation, sol.quantities,
    )
    labels = list(e.branch_labels)

    unit = pd.DataFrame(t.c.T, index=labels, columns=labels)
    unit["pl"] = t.pl
    unit["w"] = t.w
    unit["k"] = t.k

    values = pd.DataFrame(a.value_flows, index=labels, columns=labels)
    values["PL"] = a.PL
    values["W"] = a.W
    values["Wages"] = a.wages_value

    prices = pd.DataFrame(a.price_flows, index=labels, columns=labels)
    prices["S"] = a.S
    prices["P"] = a.P
    prices["Wages"] = a.wages_price

    summary = pd.DataFrame(
        {
            "r": np.full(e.n, ps.r),
            "x": a.x,
            "K": a.K,
            "K_p": a.K_p,
            "unit_price": a.unit_prices,
            "k_p": t.unit_capital_in_price(a.x),
        },
        index=labels,
    )

    lam_prime = q.lambda_prime if q.lambda_prime is not None else np.full(e.n, np.nan)
    quantities = pd.DataFrame(
        {
            "lambda": lv.lam,
            "lambda_prime": lam_prime,
            "g": q.g,
            "y": q.y,
            "y_from_values": q.y_from_values,
        },
        index=labels,
    )

    checks = solution_checks(sol, tol)
    diagnostics = pd.DataFrame(
        {
            "residual": [c.residual for c in checks],
            "tolerance": [c.tolerance for c in checks],
            "ok": [c.ok for c in checks],
        },
        index=[c.name for c in checks],
    )

    header = {
        "branches": str(e.n),
        "solver": sol.solver,
        "lambda_v": _fmt(ws.lambda_v, 9),
        "e": "infinite" if math.isinf(ws.e) else _fmt(ws.e, 9),
        "lambda": _fmt(ps.lam, 12),
        "r": _fmt(ps.r, 9),
        "q_star": _fmt(a.q_star, 12),
        "K_T": _fmt(sol.K_T, 9),
        "total_surplus": _fmt(float(a.PL.sum()), 9),
        "total_profit": _fmt(float(a.S.sum()), 9),
    }
    if sol.alternate is not None:
        header["cross_solver_deviation"] = _fmt(sol.cross_solver_deviation(), 3)
    for i, notice in enumerate(sol.notices, start=1):
        header[f"notice_{i}"] = notice

    tables = {
        "unit_values": _with_totals(unit),
        "values": _with_totals(values),
        "prices": _with_totals(prices),
        "summary": _with_totals(summary, columns=["K", "K_p"]),
        "quantities": quantities,
        "diagnostics": diagnostics,
    }
    return SolveReport(header=header, tables=tables, checks=checks)


def _fmt(value: float, digits: int) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.{digits}g}"


def render_text(report: SolveReport, digits: int) -> str:
    out = io.StringIO()
    width = max(len(k) for k in report.header)
    for key, value in report.header.items():
        out.write(f"{key.ljust(width)} : {value}\n")
    for name in TABLE_ORDER:
        df = report.tables[name]
        out.write(f"\n== {TITLES[name]} ==\n")
        out.write(df.to_string(float_format=lambda v: _fmt(v, digits), na_rep=""))
        out.write("\n")
    return out.getvalue()


def render_csv(report: SolveReport, digits: int) -> str:
    frames = []
    header = pd.DataFrame({"table": "header", "row": list(report.header), "column": "value",
                           "value": list(report.header.values())})
    frames.append(header)
    for name in TABLE_ORDER:
        df = report.tables[name]
        long = df.rename_axis("row").reset_index().melt(id_vars="row", var_name="column", value_name="value")
        long = long.dropna(subset=["value"])
        long["value"] = [v if isinstance(v, (str, bool, np.bool_)) else _fmt(float(v), digits) for v in long["value"]]
        long.insert(0, "table", name)
        frames.append(long)
    return pd.concat(frames, ignore_index=True).to_csv(index=False, lineterminator="\n")


def render_checks(checks: List[CheckResult]) -> str:
    lines = [
        f"{'PASS' if c.ok else 'FAIL'} {c.name} residual={c.residual:.3g} tol={c.tolerance:.3g}"
        for c in checks
    ]
    passed = sum(c.ok for c in checks)
    lines.append(f"checks: {passed}/{len(checks)} passed")
    return "\n".join(lines) + "\n"
