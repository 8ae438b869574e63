"""Scenario documents: JSON text with exact-rational number support.

Numbers may be JSON literals or quoted rationals such as "186/450". They are
kept as `Fraction` on the Economy so a rendered scenario parses back to the
exact same inputs.
"""
import json
import logging
import math
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional, Union

from transforma.economy import Economy, ExactInputs
from transforma.errors import ScenarioError

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("A", "l", "v")
KNOWN_FIELDS = {"n", "A", "l", "v", "K_T", "fully_consumed", "labels", "allow_zero_labor"}


def _number(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ScenarioError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ScenarioError(f"{where}: not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(f"{where}: not a number or rational: {value!r}") from None
    raise ScenarioError(f"{where}: expected a number, got {type(value).__name__}")


def _row(values: Any, where: str) -> List[Fraction]:
    if not isinstance(values, list):
        raise ScenarioError(f"{where}: expected an array")
    return [_number(x, f"{where}[{i}]") for i, x in enumerate(values)]


def _reject_constant(name: str) -> Any:
    raise ScenarioError(f"non-finite number {name} is not allowed")


def parse_scenario(text: str) -> Economy:
    try:
        doc = json.loads(text, parse_float=Fraction, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario document: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")

    missing = [k for k in REQUIRED_FIELDS if k not in doc]
    if missing:
        raise ScenarioError(f"missing fields: {', '.join(missing)}")
    unknown = sorted(set(doc) - KNOWN_FIELDS)
    if unknown:
        logger.warning("Ignoring unknown scenario fields: %s", unknown)

    if not isinstance(doc["A"], list) or not doc["A"]:
        raise ScenarioError("A: expected a non-empty array of rows")
    a = [_row(r, f"A[{i}]") for i, r in enumerate(doc["A"])]
    n = len(a)
    declared = doc.get("n", n)
    if isinstance(declared, bool) or not isinstance(declared, int) or declared != n:
        raise ScenarioError(f"n={declared!r} does not match the {n} rows of A")
    if any(len(r) != n for r in a):
        raise ScenarioError(f"A must be {n}x{n}")
    l = _row(doc["l"], "l")
    v = _row(doc["v"], "v")
    if len(l) != n or len(v) != n:
        raise ScenarioError(f"dimension mismatch: n={n}, len(l)={len(l)}, len(v)={len(v)}")
    for name, values in (("A", [x for r in a for x in r]), ("l", l), ("v", v)):
        if any(x < 0 for x in values):
            raise ScenarioError(f"{name} has negative entries")

    raw_kt = doc.get("K_T", "auto")
    k_t: Optional[Fraction]
    if isinstance(raw_kt, str) and raw_kt.strip().lower() == "auto":
        k_t = None
    else:
        k_t = _number(raw_kt, "K_T")
        if k_t <= 0:
            raise ScenarioError(f"K_T must be strictly positive, got {k_t}")

    if "fully_consumed" in doc:
        fc_raw = doc["fully_consumed"]
        if not isinstance(fc_raw, list) or any(isinstance(k, bool) or not isinstance(k, int) for k in fc_raw):
            raise ScenarioError("fully_consumed: expected an array of 1-based branch indices")
    elif n >= 3:
        raise ScenarioError("fully_consumed is required when n >= 3")
    else:
        fc_raw = []
    if any(not 1 <= k <= n for k in fc_raw):
        raise ScenarioError(f"fully_consumed: indices must lie in 1..{n}, got {fc_raw}")
    if len(set(fc_raw)) != max(n - 2, 0):
        raise ScenarioError(f"fully_consumed must name exactly {max(n - 2, 0)} distinct branches, got {fc_raw}")

    labels = doc.get("labels") or []
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise ScenarioError("labels: expected an array of strings")
    allow_zero = doc.get("allow_zero_labor", False)
    if not isinstance(allow_zero, bool):
        raise ScenarioError("allow_zero_labor: expected true or false")

    exact = ExactInputs(
        A=tuple(tuple(r) for r in a),
        l=tuple(l),
        v=tuple(v),
        K_T=k_t,
    )
    return Economy(
        A=[[float(x) for x in r] for r in a],
        l=[float(x) for x in l],
        v=[float(x) for x in v],
        K_T=float(k_t) if k_t is not None else None,
        fully_consumed=[k - 1 for k in fc_raw],
        labels=labels,
        allow_zero_labor=allow_zero,
        exact=exact,
    )


def _render_number(x: Union[Fraction, float]) -> Union[int, float, str]:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def render_scenario(e: Economy) -> str:
    if e.exact is not None:
        a, l, v, k_t = e.exact.A, e.exact.l, e.exact.v, e.exact.K_T
    else:
        a, l, v = e.A.tolist(), e.l.tolist(), e.v.tolist()
        k_t = e.K_T
    doc = {
        "n": e.n,
        "A": [[_render_number(x) for x in r] for r in a],
        "l": [_render_number(x) for x in l],
        "v": [_render_number(x) for x in v],
        "K_T": "auto" if k_t is None else _render_number(k_t),
        "fully_consumed": [k + 1 for k in e.fully_consumed],
    }
    if e.labels:
        doc["labels"] = list(e.labels)
    if e.allow_zero_labor:
        doc["allow_zero_labor"] = True
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


# ---------- File I/O ----------

def load_scenario(path: Union[str, Path]) -> Economy:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except UnicodeDecodeError as exc:
        raise ScenarioError(f"{path}: not UTF-8 text: {exc.reason} at byte {exc.start}") from None
    e = parse_scenario(text)
    logger.info("Scenario loaded: path=%s n=%d K_T=%s", path, e.n, "auto" if e.K_T is None else e.K_T)
    return e


def save_scenario(e: Economy, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(render_scenario(e))
    os.replace(tmp_path, path)
    return path
