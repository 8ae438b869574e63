import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from transforma.errors import NonProductive, ScenarioError, StructuralError
from transforma.numeric_kernel import DenseMatrix, Vector, determinant

logger = logging.getLogger(__name__)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ExactInputs:
    """Rational inputs exactly as written in the scenario document."""

    A: Tuple[Tuple[Fraction, ...], ...]
    l: Tuple[Fraction, ...]
    v: Tuple[Fraction, ...]
    K_T: Optional[Fraction]


@dataclass(frozen=True, eq=False)
class Economy:
    """Input data of an n-branch simple-reproduction economy.

    `fully_consumed` holds 0-based branch indices; scenario files use 1-based.
    `K_T` is None when the scenario asks for "auto" (total per-unit capital).
    """

    A: DenseMatrix
    l: Vector
    v: Vector
    K_T: Optional[float]
    fully_consumed: Tuple[int, ...]
    labels: Tuple[str, ...] = ()
    allow_zero_labor: bool = False
    exact: Optional[ExactInputs] = None
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen(self.A))
        object.__setattr__(self, "l", _frozen(self.l).reshape(-1))
        object.__setattr__(self, "v", _frozen(self.v).reshape(-1))
        object.__setattr__(self, "fully_consumed", tuple(sorted(int(k) for k in self.fully_consumed)))
        object.__setattr__(self, "labels", tuple(self.labels))
        n = self.A.shape[0] if self.A.ndim == 2 else 0
        if self.A.ndim != 2 or self.A.shape != (n, n) or n == 0:
            raise ScenarioError(f"A must be a non-empty square matrix, got shape={self.A.shape}")
        if self.l.shape != (n,) or self.v.shape != (n,):
            raise ScenarioError(
                f"dimension mismatch: A is {n}x{n}, l has {self.l.shape[0]} entries, v has {self.v.shape[0]}"
            )
        if self.labels and len(self.labels) != n:
            raise ScenarioError(f"expected {n} labels, got {len(self.labels)}")
        for name, arr in (("A", self.A), ("l", self.l), ("v", self.v)):
            if not np.all(np.isfinite(arr)):
                raise ScenarioError(f"{name} has non-finite entries")
            if np.any(arr < 0):
                raise ScenarioError(f"{name} has negative entries")
        if self.K_T is not None and not (np.isfinite(self.K_T) and self.K_T > 0):
            raise ScenarioError(f"K_T must be strictly positive, got {self.K_T}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def branch_labels(self) -> Tuple[str, ...]:
        return self.labels or tuple(f"branch_{i + 1}" for i in range(self.n))

    def with_wage_basket(self, v) -> "Economy":
        """Same economy with another wage basket; exact inputs are dropped."""
        return replace(self, v=np.array(v, dtype=np.float64), exact=None, validated=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Economy):
            return NotImplemented
        return (
            np.array_equal(self.A, other.A)
            and np.array_equal(self.l, other.l)
            and np.array_equal(self.v, other.v)
            and self.K_T == other.K_T
            and self.fully_consumed == other.fully_consumed
            and self.labels == other.labels
            and self.allow_zero_labor == other.allow_zero_labor
        )

    __hash__ = None


def leading_minors(m: DenseMatrix) -> List[float]:
    return [determinant(m[:k, :k]) for k in range(1, m.shape[0] + 1)]


def is_irreducible(b: DenseMatrix) -> bool:
    """True when the directed graph of the nonzero pattern of `b` is strongly connected."""
    n = b.shape[0]
    adj = (np.asarray(b) != 0).astype(np.int64)
    reach = np.eye(n, dtype=np.int64)
    for _ in range(n):
        reach = ((reach + reach @ adj) > 0).astype(np.int64)
    return bool(np.all(reach > 0))


def validate(e: Economy) -> Economy:
    """Check structure and the Hawkins-Simon condition; returns `e` marked validated."""
    n = e.n
    if n < 2:
        raise StructuralError(f"an economy needs at least two branches, got n={n}")
    bad = [k for k in e.fully_consumed if not 0 <= k < n]
    if bad:
        raise StructuralError(f"fully_consumed index out of range: {[k + 1 for k in bad]} (n={n})")
    if len(set(e.fully_consumed)) != len(e.fully_consumed):
        raise StructuralError("fully_consumed has duplicate indices")
    if len(e.fully_consumed) != n - 2:
        raise StructuralError(
            f"fully_consumed must name exactly n-2={n - 2} branches, got {len(e.fully_consumed)}"
        )
    if not e.allow_zero_labor and np.any(e.l <= 0):
        zero = [i + 1 for i in np.flatnonzero(e.l <= 0)]
        raise StructuralError(f"zero direct labor in branches {zero}; set allow_zero_labor to permit it")

    minors = leading_minors(np.eye(n) - e.A)
    for k, minor in enumerate(minors, start=1):
        if not minor > 0:
            raise NonProductive(k, minor)

    augmented = e.A + np.outer(e.v, e.l)
    if not is_irreducible(augmented):
        logger.warning("Augmented matrix A + v.l is reducible: positive eigenvector not guaranteed")

    logger.debug("Economy validated: n=%d minors=%s", n, ["%.6g" % m for m in minors])
    return replace(e, validated=True)


def require_validated(e: Economy) -> None:
    if not e.validated:
        raise StructuralError("economy must be validated before solving")
