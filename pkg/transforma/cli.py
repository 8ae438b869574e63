import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from transforma.errors import TransformaError
from transforma.pipeline import SOLVERS, TransformationPipeline
from transforma.report import build_report, render_checks, render_csv, render_text
from transforma.scenario import load_scenario
from transforma.settings import Settings
from transforma.sweep import load_sweep_spec, run_sweep, write_sweep_csv

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

logger = logging.getLogger("transforma")


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transforma",
        description="Transform labor values into production prices for a simple-reproduction economy",
    )
    parser.add_argument("--tol", type=float, default=None, help="Residual tolerance (overrides TRANSFORMA_TOL)")
    parser.add_argument("--log-level", default=None, help="Logging level (overrides LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve a scenario and print the report tables")
    solve.add_argument("scenario", type=Path, help="Path to the scenario file")
    solve.add_argument("--solver", choices=SOLVERS, default="direct", help="Allocation solver")
    solve.add_argument("--digits", type=_positive_int, default=None, help="Significant digits in the report")
    solve.add_argument("--format", choices=("text", "csv"), default="text", help="Report format")
    solve.add_argument("--normalize-to", type=float, default=None, metavar="X",
                       help="Rescale capitals and quantities to total capital X")
    solve.add_argument("--dq", type=float, default=None, help="Initial q step of the iterative solver")
    solve.add_argument("--zooms", type=_positive_int, default=6, help="Zoom levels of the iterative solver")
    solve.add_argument("-o", "--output", type=Path, default=None, help="Also write the report to this file")

    check = sub.add_parser("check", help="Run every invariant check on a scenario")
    check.add_argument("scenario", type=Path, help="Path to the scenario file")

    sweep = sub.add_parser("sweep", help="Sweep a family of wage baskets and write a CSV series")
    sweep.add_argument("scenario", type=Path, help="Path to the scenario file")
    sweep.add_argument("--spec", type=Path, required=True, help="Path to the sweep spec file")
    sweep.add_argument("-o", "--output", type=Path, required=True, help="CSV output path")
    return parser


def run_solve(args: argparse.Namespace, settings: Settings) -> int:
    economy = load_scenario(args.scenario)
    pipeline = TransformationPipeline(settings)
    solution = pipeline.solve(economy, solver=args.solver, dq=args.dq, zooms=args.zooms)
    if args.normalize_to is not None:
        solution = solution.rescaled(args.normalize_to)
    report = build_report(solution, settings.tol)
    digits = args.digits if args.digits is not None else settings.digits
    text = render_csv(report, digits) if args.format == "csv" else render_text(report, digits)
    sys.stdout.write(text)
    if args.output:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        with open(args.output, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        logger.info("Report written: path=%s", args.output)
    return EXIT_OK


def run_check(args: argparse.Namespace, settings: Settings) -> int:
    economy = load_scenario(args.scenario)
    solution = TransformationPipeline(settings).solve(economy, solver="both")
    report = build_report(solution, settings.tol)
    for notice in solution.notices:
        sys.stdout.write(f"NOTE {notice}\n")
    sys.stdout.write(render_checks(report.checks))
    failed = [c for c in report.checks if not c.ok]
    for c in failed:
        logger.warning("Check failed: name=%s residual=%.3g tol=%.3g", c.name, c.residual, c.tolerance)
    return EXIT_OK if not failed else EXIT_DOMAIN


def run_sweep_command(args: argparse.Namespace, settings: Settings) -> int:
    economy = load_scenario(args.scenario)
    spec = load_sweep_spec(args.spec)
    df = run_sweep(economy, spec, settings)
    write_sweep_csv(df, args.output)
    logger.info("Sweep written: path=%s rows=%d", args.output, len(df))
    return EXIT_OK


COMMANDS = {
    "solve": run_solve,
    "check": run_check,
    "sweep": run_sweep_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings.from_env().with_overrides(tol=args.tol, log_level=args.log_level)
    except TransformaError as exc:
        sys.stderr.write(f"error: {exc.__class__.__name__}: {exc}\n")
        return EXIT_DOMAIN
    _configure_logging(settings.log_level)

    try:
        return COMMANDS[args.command](args, settings)
    except TransformaError as exc:
        sys.stderr.write(f"error: {exc.__class__.__name__}: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"error: {exc.__class__.__name__}: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
