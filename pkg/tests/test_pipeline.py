import numpy as np
import pytest

import transforma.pipeline as pipeline_module
from transforma.errors import NoRoot
from transforma.report import CheckResult, build_report, render_checks, render_csv, render_text, solution_checks


def test_first_case_solution(first_case, pipeline):
    sol = pipeline.solve(first_case)
    assert sol.solver == "direct"
    assert sol.K_T == pytest.approx(2.37022)
    assert sol.notices == []
    assert sol.alternate is None
    assert sol.cross_solver_deviation() is None
    assert sol.prices.r == pytest.approx(0.1853741248, abs=1e-9)


def test_both_solvers(first_case, pipeline):
    sol = pipeline.solve(first_case, solver="both")
    assert sol.alternate.method == "iterative"
    assert sol.cross_solver_deviation() < 1e-6


def test_both_records_iterative_failure(first_case, pipeline, monkeypatch):
    real = pipeline_module.solve_allocation

    def no_root_for_iterative(*args, method="direct", **kwargs):
        if method == "iterative":
            raise NoRoot("no descending zero of z(q); z(q) has a pole at q=0.9", q_last=12.0)
        return real(*args, method=method, **kwargs)

    monkeypatch.setattr(pipeline_module, "solve_allocation", no_root_for_iterative)
    sol = pipeline.solve(first_case, solver="both")
    assert sol.alternate is None
    assert sol.alternate_error.startswith("NoRoot:")
    assert any(n.startswith("iterative solver failed") for n in sol.notices)
    checks = {c.name: c for c in build_report(sol, 1e-8).checks}
    assert not checks["cross_solver_agreement"].ok
    assert checks["rate_balance_sum_Kr_eq_KT_r"].ok


def test_iterative_primary(first_case, pipeline):
    sol = pipeline.solve(first_case, solver="iterative")
    assert sol.solver == "iterative"


def test_auto_total_capital_and_reroute(maximal_wage_meat, pipeline):
    sol = pipeline.solve(maximal_wage_meat, solver="both")
    assert sol.zero_surplus
    assert sol.alternate is None
    assert sol.K_T == pytest.approx(32 / 11)
    assert any("K_T=auto" in n for n in sol.notices)
    assert any("zero_surplus" in n for n in sol.notices)


def test_unknown_solver(first_case, pipeline):
    with pytest.raises(ValueError):
        pipeline.solve(first_case, solver="fastest")


def test_rescaled_solution(first_case, pipeline):
    sol = pipeline.solve(first_case)
    unit = sol.rescaled(1.0)
    assert unit.allocation.K.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(unit.allocation.x, sol.allocation.x)
    np.testing.assert_allclose(unit.quantities.g, sol.quantities.g / sol.K_T)
    assert unit.notices[-1].startswith("rescaled")
    assert all(c.ok for c in solution_checks(unit, 1e-8))
    with pytest.raises(ValueError):
        sol.rescaled(0.0)


def test_checks_pass_for_worked_cases(first_case, zero_wage, maximal_wage_meat, maximal_wage_wheat, pipeline):
    for e in (first_case, maximal_wage_meat, maximal_wage_wheat):
        checks = solution_checks(pipeline.solve(e, solver="both"), 1e-8)
        assert [c.name for c in checks if not c.ok] == []
    names = [c.name for c in solution_checks(pipeline.solve(zero_wage), 1e-8)]
    assert "reproduction_value_Iron" in names
    assert "reproduction_net_output_Iron" in names


def test_zero_surplus_checks_prices_equal_values(maximal_wage_meat, pipeline):
    names = [c.name for c in solution_checks(pipeline.solve(maximal_wage_meat), 1e-8)]
    assert "prices_equal_values" in names


def test_report_tables(first_case, pipeline):
    report = build_report(pipeline.solve(first_case, solver="both"), 1e-8)
    assert report.ok
    assert list(report.tables) == ["unit_values", "values", "prices", "summary", "quantities", "diagnostics"]
    unit = report.tables["unit_values"]
    assert list(unit.columns) == ["Wheat", "Iron", "Meat", "pl", "w", "k"]
    assert unit.loc["Total", "k"] == pytest.approx(2.370216, rel=1e-6)
    summary = report.tables["summary"]
    assert summary.loc["Total", "K"] == pytest.approx(2.37022)
    assert np.isnan(summary.loc["Total", "x"])
    assert report.header["r"] == "0.185374125"
    assert report.header["e"] == "0.941176471"
    assert "cross_solver_deviation" in report.header


def test_render_text_and_csv(first_case, pipeline):
    report = build_report(pipeline.solve(first_case), 1e-8)
    text = render_text(report, 6)
    assert "== Profit rate, transformation coefficients and capitals ==" in text
    assert "0.185374" in text
    csv = render_csv(report, 6)
    assert csv.splitlines()[0] == "table,row,column,value"
    assert "summary,Wheat,K,1.31724" in csv


def test_render_checks_counts():
    text = render_checks([CheckResult("a", 0.0, 1e-9), CheckResult("b", 1.0, 1e-9)])
    assert text.splitlines() == [
        "PASS a residual=0 tol=1e-09",
        "FAIL b residual=1 tol=1e-09",
        "checks: 1/2 passed",
    ]
