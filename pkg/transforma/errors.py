from typing import Optional, Sequence


class TransformaError(RuntimeError):
    """Base class for every domain failure raised by transforma."""


class ConfigurationError(TransformaError):
    pass


class ScenarioError(TransformaError, ValueError):
    """Malformed scenario document or inconsistent dimensions."""


class StructuralError(TransformaError):
    pass


class NonProductive(TransformaError):
    """(I - A) fails the Hawkins-Simon condition."""

    def __init__(self, minor_index: int, minor_value: float):
        self.minor_index = minor_index
        self.minor_value = minor_value
        super().__init__(
            f"Hawkins-Simon condition violated: leading minor {minor_index} = {minor_value:.6g}"
        )


class Singular(TransformaError):
    def __init__(self, message: str, pivot: Optional[float] = None):
        self.pivot = pivot
        super().__init__(message)


class NoConvergence(TransformaError):
    def __init__(self, message: str, iterations: int):
        self.iterations = iterations
        super().__init__(message)


class ZeroMatrix(TransformaError):
    pass


class WageExceedsValue(TransformaError):
    def __init__(self, wage_value: float):
        self.wage_value = wage_value
        super().__init__(f"wage basket value exceeds one hour: lambda_v={wage_value:.12g}")


class ZeroOutputValue(TransformaError):
    pass


class NegativeCapital(TransformaError):
    def __init__(self, capitals: Sequence[float]):
        self.capitals = tuple(float(k) for k in capitals)
        shown = ", ".join(f"{k:.6g}" for k in self.capitals)
        super().__init__(f"allocation has non-positive capital: K=({shown})")


class NoRoot(TransformaError):
    def __init__(self, message: str, q_last: float):
        self.q_last = q_last
        super().__init__(message)


class SolverNotApplicable(TransformaError):
    pass


class SweepSpecError(TransformaError, ValueError):
    pass
