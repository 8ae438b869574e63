from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from transforma.allocation_solver import default_q_step, solve_direct, step_k_pole
from transforma.economy import Economy, validate
from transforma.errors import NegativeCapital
from transforma.pipeline import TransformationPipeline
from transforma.price_system import build_share_matrix, profit_rate
from transforma.scenario import load_scenario
from transforma.settings import Settings
from transforma.value_system import labor_values, unit_value_table, wage_structure

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIOS


@pytest.fixture
def first_case() -> Economy:
    return load_scenario(SCENARIOS / "first_case.json")


@pytest.fixture
def zero_wage() -> Economy:
    return load_scenario(SCENARIOS / "zero_wage.json")


@pytest.fixture
def maximal_wage_meat() -> Economy:
    return load_scenario(SCENARIOS / "maximal_wage_meat.json")


@pytest.fixture
def maximal_wage_wheat() -> Economy:
    return load_scenario(SCENARIOS / "maximal_wage_wheat.json")


@pytest.fixture
def pipeline() -> TransformationPipeline:
    return TransformationPipeline(Settings())


RANDOM_DRAWS = 50


def solvable(e: Economy) -> bool:
    """Direct allocation is positive and z(q) has no pole in (0, 1.05 q* + 2 dq]."""
    ev = validate(e)
    lv = labor_values(ev)
    t = unit_value_table(ev, lv, wage_structure(lv, ev.v))
    ps = profit_rate(build_share_matrix(t))
    try:
        a = solve_direct(t, ps, ev.K_T, ev.fully_consumed)
    except NegativeCapital:
        return False
    pole = step_k_pole(t, ps.x_star, ev.fully_consumed)
    limit = 1.05 * a.q_star + 2.0 * default_q_step(t, ps.x_star)
    return pole is None or not 0.0 < pole <= limit


def random_economy(seed: int, n: int) -> Economy:
    """Productive economy with dense A, column sums in [0.2, 0.7] and lambda.v in [0.2, 0.8].

    The fully consumed branches are tried in random order; the first choice
    with a positive allocation and a pole-free z(q) up to q* wins. Without
    one the technology is drawn again from the same generator.
    """
    rng = np.random.default_rng(seed)
    choices = list(combinations(range(n), max(n - 2, 0)))
    for _ in range(RANDOM_DRAWS):
        a = rng.uniform(0.05, 1.0, size=(n, n))
        a *= rng.uniform(0.2, 0.7, size=n)[np.newaxis, :] / a.sum(axis=0)[np.newaxis, :]
        l = rng.uniform(0.2, 1.0, size=n)
        lam = np.linalg.solve((np.eye(n) - a).T, l)
        v = rng.uniform(0.05, 1.0, size=n)
        v *= rng.uniform(0.2, 0.8) / float(lam @ v)
        k_t = float(rng.uniform(0.5, 5.0))
        for i in rng.permutation(len(choices)):
            e = Economy(A=a, l=l, v=v, K_T=k_t, fully_consumed=choices[i])
            if solvable(e):
                return e
    raise RuntimeError(f"no solvable economy in {RANDOM_DRAWS} draws: seed={seed} n={n}")


@pytest.fixture
def make_random_economy():
    return random_economy
