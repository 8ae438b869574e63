"""Wage-basket sweeps: how r, q*, x and K respond to the composition of v."""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from transforma.allocation_solver import solve_allocation
from transforma.economy import Economy, validate
from transforma.errors import NegativeCapital, SweepSpecError, TransformaError, WageExceedsValue
from transforma.price_system import build_share_matrix, profit_rate
from transforma.settings import Settings
from transforma.value_system import labor_values, unit_value_table, wage_structure

logger = logging.getLogger(__name__)

KINDS = ("iso_value", "scale")
E_TOL = 1e-9


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    samples: int
    branches: Tuple[int, int] = (0, 0)  # 0-based (from, to) for iso_value
    low: Optional[float] = None
    high: Optional[float] = None


def _reject_constant(name: str) -> float:
    raise SweepSpecError(f"non-finite number {name} is not allowed")


def parse_sweep_spec(text: str) -> SweepSpec:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SweepSpecError(f"malformed sweep spec: {exc}") from None
    if not isinstance(doc, dict):
        raise SweepSpecError("sweep spec must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SweepSpecError(f"kind must be one of {KINDS}, got {kind!r}")
    samples = doc.get("samples", 21)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        raise SweepSpecError(f"samples must be a positive integer, got {samples!r}")

    def opt_float(key: str) -> Optional[float]:
        value = doc.get(key)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SweepSpecError(f"{key} must be a number, got {value!r}")
        return float(value)

    if kind == "scale":
        return SweepSpec(
            kind=kind,
            samples=samples,
            low=opt_float("t_min") if "t_min" in doc else 0.0,
            high=opt_float("t_max") if "t_max" in doc else 1.0,
        )
    branches = doc.get("branches")
    if (
        not isinstance(branches, list)
        or len(branches) != 2
        or any(isinstance(b, bool) or not isinstance(b, int) for b in branches)
        or branches[0] == branches[1]
    ):
        raise SweepSpecError("iso_value sweeps need \"branches\": [from, to] with two distinct 1-based indices")
    return SweepSpec(
        kind=kind,
        samples=samples,
        branches=(branches[0] - 1, branches[1] - 1),
        low=opt_float("shift_min"),
        high=opt_float("shift_max"),
    )


def load_sweep_spec(path: Union[str, Path]) -> SweepSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except UnicodeDecodeError as exc:
        raise SweepSpecError(f"{path}: not UTF-8 text: {exc.reason} at byte {exc.start}") from None
    return parse_sweep_spec(text)


def wage_baskets(spec: SweepSpec, v: np.ndarray, lam: np.ndarray) -> List[Tuple[float, np.ndarray]]:
    """(parameter, basket) pairs of the family described by `spec`.

    A single-sample sweep evaluates the scenario's own basket (t = 1, or a
    zero shift) whatever the range bounds say.
    """
    n = v.shape[0]
    if spec.kind == "scale":
        if spec.samples == 1:
            return [(1.0, v.astype(np.float64).copy())]
        return [(float(t), t * v) for t in np.linspace(spec.low, spec.high, spec.samples)]

    src, dst = spec.branches
    if not (0 <= src < n and 0 <= dst < n):
        raise SweepSpecError(f"branches {src + 1},{dst + 1} out of range for n={n}")
    if spec.samples == 1:
        return [(0.0, v.astype(np.float64).copy())]
    # h: hours of value moved from `src` to `dst`; lambda . v is unchanged
    h_min = -v[dst] * lam[dst] if spec.low is None else spec.low
    h_max = v[src] * lam[src] if spec.high is None else spec.high
    baskets = []
    for h in np.linspace(h_min, h_max, spec.samples):
        basket = v.astype(np.float64).copy()
        basket[src] -= h / lam[src]
        basket[dst] += h / lam[dst]
        # floating noise at the range ends
        basket[np.abs(basket) < 1e-15] = 0.0
        baskets.append((float(h), basket))
    return baskets


def _sample_row(e: Economy, index: int, param: float, v: np.ndarray, settings: Settings) -> dict:
    n = e.n
    row = {"sample": index, "param": param}
    row.update({f"v_{i + 1}": v[i] for i in range(n)})
    row.update({"lambda_v": math.nan, "e": math.nan, "r": math.nan, "q_star": math.nan})
    row.update({f"x_{i + 1}": math.nan for i in range(n)})
    row.update({f"K_{i + 1}": math.nan for i in range(n)})
    if np.any(v < 0):
        row["status"] = "infeasible_wage"
        return row
    try:
        ev = validate(e.with_wage_basket(v))
        lv = labor_values(ev)
        ws = wage_structure(lv, ev.v)
        row["lambda_v"], row["e"] = ws.lambda_v, ws.e
        table = unit_value_table(ev, lv, ws)
        ps = profit_rate(build_share_matrix(table), tol=settings.eigen_tol, max_iter=settings.max_iter)
        row["r"] = ps.r
        K_T = ev.K_T if ev.K_T is not None else table.k_T_unit
        a = solve_allocation(
            table, ps, K_T, ev.fully_consumed, method="direct", tol=settings.eigen_tol, max_iter=settings.max_iter
        )
    except WageExceedsValue:
        row["status"] = "infeasible_wage"
        return row
    except NegativeCapital:
        row["status"] = "negative_capital"
        return row
    except TransformaError as exc:
        row["status"] = f"error:{exc.__class__.__name__}"
        return row
    row["q_star"] = a.q_star
    row.update({f"x_{i + 1}": a.x[i] for i in range(n)})
    row.update({f"K_{i + 1}": a.K[i] for i in range(n)})
    row["status"] = "zero_surplus" if a.method == "zero_surplus" else "ok"
    return row


def run_sweep(e: Economy, spec: SweepSpec, settings: Optional[Settings] = None) -> pd.DataFrame:
    settings = settings or Settings.from_env()
    base = validate(e) if not e.validated else e
    lam = labor_values(base).lam
    baskets = wage_baskets(spec, base.v, lam)
    logger.info("Sweep started: kind=%s samples=%d", spec.kind, len(baskets))
    rows = [_sample_row(base, i, param, v, settings) for i, (param, v) in enumerate(baskets)]
    df = pd.DataFrame(rows)

    if spec.kind == "iso_value":
        e_values = df["e"].dropna()
        e_values = e_values[np.isfinite(e_values)]
        if len(e_values) and float(e_values.max() - e_values.min()) > E_TOL:
            raise TransformaError(
                f"exploitation rate drifted across an iso-value sweep: spread={e_values.max() - e_values.min():.3g}"
            )
    failed = int((df["status"] != "ok").sum())
    if failed:
        logger.warning("Sweep finished with non-ok samples: count=%d", failed)
    logger.info("Sweep finished: samples=%d r_min=%.9g r_max=%.9g", len(df), df["r"].min(), df["r"].max())
    return df


def write_sweep_csv(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, lineterminator="\n", float_format="%.12g")
    return path
