import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from transforma.economy import validate
from transforma.errors import StructuralError, WageExceedsValue
from transforma.scenario import load_scenario
from transforma.value_system import (
    UnitValueTable,
    labor_values,
    per_capital,
    unit_value_table,
    wage_structure,
)

# first case: l = (1/25, 4/7, 1/2), lambda.v = 17/33
LAMBDA = np.array([2 / 11, 20 / 11, 10 / 11])
FIRST_CASE = Path(__file__).resolve().parent.parent / "scenarios" / "first_case.json"


def table_for(e):
    e = validate(e)
    lv = labor_values(e)
    return e, lv, unit_value_table(e, lv, wage_structure(lv, e.v))


def test_labor_values(first_case):
    np.testing.assert_allclose(labor_values(validate(first_case)).lam, LAMBDA, rtol=1e-12)


def test_labor_values_need_validation(first_case):
    with pytest.raises(StructuralError):
        labor_values(first_case)


def test_wage_structure(first_case):
    lv = labor_values(validate(first_case))
    ws = wage_structure(lv, first_case.v)
    assert ws.lambda_v == pytest.approx(17 / 33, rel=1e-12)
    assert ws.e == pytest.approx(16 / 17, rel=1e-12)
    assert ws.alpha.sum() == pytest.approx(1.0)


def test_zero_wage_has_infinite_exploitation(zero_wage):
    ws = wage_structure(labor_values(validate(zero_wage)), zero_wage.v)
    assert ws.lambda_v == 0.0
    assert math.isinf(ws.e)
    assert ws.alpha is None


def test_full_wage_has_zero_exploitation(maximal_wage_meat):
    ws = wage_structure(labor_values(validate(maximal_wage_meat)), maximal_wage_meat.v)
    assert ws.lambda_v == 1.0
    assert ws.e == 0.0


def test_wage_above_one_hour_rejected(first_case):
    lv = labor_values(validate(first_case))
    with pytest.raises(WageExceedsValue) as info:
        wage_structure(lv, [3.0, 0.0, 0.7])
    assert info.value.wage_value == pytest.approx(13 / 11)


def test_unit_value_table(first_case):
    _, _, t = table_for(first_case)
    np.testing.assert_allclose(t.pl, [16 / 825, 64 / 231, 8 / 33], rtol=1e-12)
    np.testing.assert_allclose(t.w, LAMBDA, rtol=1e-12)
    np.testing.assert_allclose(t.k + t.pl, t.w, rtol=1e-12)
    np.testing.assert_allclose(t.c.sum(axis=1), [1.037749, 0.658874, 0.673593], rtol=2e-6)
    assert t.k_T_unit == pytest.approx(2.370216, rel=1e-6)


def test_value_is_conserved(first_case):
    e, lv, t = table_for(first_case)
    circulating = t.c - t.variable
    np.testing.assert_allclose(circulating.sum(axis=0) + e.l, lv.lam, rtol=1e-12)


def test_surplus_equals_labor_without_wages(zero_wage):
    e, _, t = table_for(zero_wage)
    np.testing.assert_allclose(t.pl, e.l, rtol=1e-15)
    assert not t.variable.any()


def test_per_capital_columns_commit_one_unit(first_case):
    _, _, t = table_for(first_case)
    np.testing.assert_allclose(t.c_hat.sum(axis=0), 1.0, rtol=1e-12)
    np.testing.assert_allclose(t.w_hat, 1.0 + t.pl_hat, rtol=1e-12)
    again = per_capital(t.c_hat, t.pl_hat, t.w_hat)
    for got, want in zip(again, (t.c_hat, t.pl_hat, t.w_hat)):
        np.testing.assert_allclose(got, want, rtol=1e-12)


def test_from_columns_matches_builder(first_case):
    _, _, t = table_for(first_case)
    rebuilt = UnitValueTable.from_columns(t.c, t.pl, t.w)
    np.testing.assert_allclose(rebuilt.c_hat, t.c_hat)
    np.testing.assert_allclose(rebuilt.w_hat, t.w_hat)


@pytest.mark.parametrize("seed", range(8))
def test_labor_values_fixed_point(seed, make_random_economy):
    e = validate(make_random_economy(seed, 2 + seed % 4))
    lam = np.zeros(e.n)
    for _ in range(500):
        lam = lam @ e.A + e.l
    np.testing.assert_allclose(labor_values(e).lam, lam, rtol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0))
def test_iso_value_basket_keeps_exploitation_rate(share):
    e = validate(load_scenario(FIRST_CASE))
    lv = labor_values(e)
    # move hours of value from wheat to meat
    h = share * e.v[0] * lv.lam[0]
    v = e.v.copy()
    v[0] -= h / lv.lam[0]
    v[2] += h / lv.lam[2]
    v[np.abs(v) < 1e-15] = 0.0
    assert wage_structure(lv, v).e == pytest.approx(wage_structure(lv, e.v).e, rel=1e-12)
    _, _, base = table_for(e)
    _, _, shifted = table_for(e.with_wage_basket(v))
    np.testing.assert_allclose(shifted.pl, base.pl, rtol=1e-12, atol=1e-15)
