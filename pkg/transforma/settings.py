import logging
import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

from transforma.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_EIGEN_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
DEFAULT_DIGITS = 9


def _get_env_any(*keys: str) -> Optional[str]:
    for k in keys:
        v = os.getenv(k)
        if v:
            return v
    return None


def _float_from_env(default: float, *keys: str) -> float:
    raw = _get_env_any(*keys)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning("Ignoring malformed setting: keys=%s value=%r default=%s", keys, raw, default)
        return default


def _int_from_env(default: int, *keys: str) -> int:
    raw = _get_env_any(*keys)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring malformed setting: keys=%s value=%r default=%s", keys, raw, default)
        return default


@dataclass(frozen=True)
class Settings:
    tol: float = DEFAULT_TOL
    eigen_tol: float = DEFAULT_EIGEN_TOL
    max_iter: int = DEFAULT_MAX_ITER
    digits: int = DEFAULT_DIGITS
    log_level: str = "INFO"

    def __post_init__(self):
        if not self.tol > 0:
            raise ConfigurationError(f"residual tolerance must be positive: tol={self.tol}")
        if not self.eigen_tol > 0:
            raise ConfigurationError(f"eigen tolerance must be positive: eigen_tol={self.eigen_tol}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1: max_iter={self.max_iter}")
        if self.digits < 1:
            raise ConfigurationError(f"digits must be >= 1: digits={self.digits}")

    @classmethod
    def from_env(cls) -> "Settings":
        """Read settings from the environment (and a `.env` file if present)."""
        load_dotenv()
        return cls(
            tol=_float_from_env(DEFAULT_TOL, "TRANSFORMA_TOL"),
            eigen_tol=_float_from_env(DEFAULT_EIGEN_TOL, "TRANSFORMA_EIGEN_TOL"),
            max_iter=_int_from_env(DEFAULT_MAX_ITER, "TRANSFORMA_MAX_ITER"),
            digits=_int_from_env(DEFAULT_DIGITS, "TRANSFORMA_DIGITS"),
            log_level=(_get_env_any("TRANSFORMA_LOG_LEVEL", "LOG_LEVEL") or "INFO").upper(),
        )

    def with_overrides(self, **changes) -> "Settings":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)
