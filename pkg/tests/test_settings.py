import pytest

from transforma.errors import ConfigurationError
from transforma.settings import Settings


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ("TRANSFORMA_TOL", "TRANSFORMA_EIGEN_TOL", "TRANSFORMA_MAX_ITER", "TRANSFORMA_DIGITS",
                "TRANSFORMA_LOG_LEVEL", "LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setattr("transforma.settings.load_dotenv", lambda *a, **k: False)


def test_defaults():
    s = Settings.from_env()
    assert s == Settings()
    assert (s.tol, s.eigen_tol, s.max_iter, s.digits, s.log_level) == (1e-8, 1e-12, 100_000, 9, "INFO")


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("TRANSFORMA_TOL", "1e-6")
    monkeypatch.setenv("TRANSFORMA_MAX_ITER", "50")
    monkeypatch.setenv("LOG_LEVEL", "debug")
    s = Settings.from_env()
    assert s.tol == 1e-6
    assert s.max_iter == 50
    assert s.log_level == "DEBUG"


def test_malformed_value_falls_back(monkeypatch):
    monkeypatch.setenv("TRANSFORMA_DIGITS", "many")
    assert Settings.from_env().digits == 9


def test_non_positive_tolerance_rejected(monkeypatch):
    monkeypatch.setenv("TRANSFORMA_TOL", "-1")
    with pytest.raises(ConfigurationError):
        Settings.from_env()


def test_overrides_skip_none():
    s = Settings().with_overrides(tol=1e-5, log_level=None)
    assert s.tol == 1e-5
    assert s.log_level == "INFO"
    with pytest.raises(ConfigurationError):
        Settings().with_overrides(digits=0)
