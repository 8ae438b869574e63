import logging

import numpy as np
import pytest

from transforma.economy import Economy, is_irreducible, leading_minors, require_validated, validate
from transforma.errors import NonProductive, ScenarioError, StructuralError


def two_branch(a, l=(1.0, 1.0), v=(0.0, 0.0), **kwargs) -> Economy:
    return Economy(A=a, l=l, v=v, K_T=1.0, fully_consumed=(), **kwargs)


def test_first_case_validates(first_case):
    e = validate(first_case)
    assert e.validated
    assert not first_case.validated
    assert e == first_case
    assert e.branch_labels == ("Wheat", "Iron", "Meat")


def test_zero_input_matrix_is_productive():
    assert validate(two_branch(np.zeros((2, 2)))).validated


def test_oversized_own_input_fails_first_minor():
    with pytest.raises(NonProductive) as info:
        validate(two_branch([[1.5, 0.0], [0.0, 0.0]]))
    assert info.value.minor_index == 1
    assert info.value.minor_value == pytest.approx(-0.5)


def test_identity_input_matrix_is_not_productive():
    with pytest.raises(NonProductive):
        validate(two_branch(np.eye(2)))


def test_second_minor_failure_reported():
    with pytest.raises(NonProductive) as info:
        validate(two_branch([[0.5, 1.0], [1.0, 0.5]]))
    assert info.value.minor_index == 2


def test_single_branch_rejected():
    e = Economy(A=[[0.2]], l=[1.0], v=[0.5], K_T=1.0, fully_consumed=())
    with pytest.raises(StructuralError):
        validate(e)


def test_fully_consumed_count_enforced(first_case):
    with pytest.raises(StructuralError):
        validate(Economy(A=first_case.A, l=first_case.l, v=first_case.v, K_T=1.0, fully_consumed=()))


def test_fully_consumed_out_of_range(first_case):
    with pytest.raises(StructuralError):
        validate(Economy(A=first_case.A, l=first_case.l, v=first_case.v, K_T=1.0, fully_consumed=(3,)))


def test_zero_labor_needs_flag():
    with pytest.raises(StructuralError):
        validate(two_branch([[0.1, 0.2], [0.3, 0.1]], l=(1.0, 0.0)))
    assert validate(two_branch([[0.1, 0.2], [0.3, 0.1]], l=(1.0, 0.0), allow_zero_labor=True)).validated


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(A=[[0.1, -0.2], [0.3, 0.1]], l=[1, 1], v=[0, 0]),
        dict(A=[[0.1, 0.2], [0.3, 0.1]], l=[1, 1, 1], v=[0, 0]),
        dict(A=[[0.1, 0.2, 0.3], [0.3, 0.1, 0.1]], l=[1, 1], v=[0, 0]),
        dict(A=[[0.1, 0.2], [0.3, 0.1]], l=[1, float("nan")], v=[0, 0]),
    ],
)
def test_malformed_inputs_rejected(kwargs):
    with pytest.raises(ScenarioError):
        Economy(K_T=1.0, fully_consumed=(), **kwargs)


def test_non_positive_total_capital_rejected():
    with pytest.raises(ScenarioError):
        Economy(A=np.zeros((2, 2)), l=[1, 1], v=[0, 0], K_T=0.0, fully_consumed=())


def test_arrays_are_read_only(first_case):
    with pytest.raises(ValueError):
        first_case.A[0, 0] = 1.0


def test_with_wage_basket_drops_exact_and_validation(first_case):
    e = validate(first_case).with_wage_basket([1.0, 0.0, 0.5])
    assert e.exact is None
    assert not e.validated
    np.testing.assert_array_equal(e.v, [1.0, 0.0, 0.5])


def test_require_validated(first_case):
    with pytest.raises(StructuralError):
        require_validated(first_case)
    require_validated(validate(first_case))


@pytest.mark.parametrize("seed", range(10))
def test_leading_minors_match_numpy(seed):
    rng = np.random.default_rng(seed)
    m = np.eye(4) - rng.uniform(0, 0.2, size=(4, 4))
    expected = [np.linalg.det(m[:k, :k]) for k in range(1, 5)]
    np.testing.assert_allclose(leading_minors(m), expected, rtol=1e-10)


def test_irreducibility():
    assert is_irreducible(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert not is_irreducible(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert is_irreducible(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]))


def test_reducible_augmented_matrix_warns(caplog):
    e = two_branch([[0.2, 0.0], [0.0, 0.2]])
    with caplog.at_level(logging.WARNING, logger="transforma.economy"):
        validate(e)
    assert "reducible" in caplog.text
