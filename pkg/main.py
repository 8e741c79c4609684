"""Command-line entry point of the crane sway lab.

    python main.py simulate --scenario scenario_files/damping.ini --out runs
    python main.py sweep --scenario scenario_files/free_oscillation.ini --grid scenario_files/angle_grid.ini
    python main.py metrics --trace runs/damping-zeta-0.2_seed0.csv
    python main.py view --trace runs/damping-zeta-0.2_seed0.csv

Exit codes: 0 success, 1 bad input, 2 a metric did not converge, 3 a run
was aborted.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from errors import CraneLabError, ScenarioConfigError, SimulationAborted
from scenarios import (
    MetricsReport,
    apply_overrides,
    evaluate_metrics,
    load_grid,
    load_scenario,
    read_trace,
    run_scenario,
    sweep,
)

logger = logging.getLogger("crane_lab")

OUT_DIR_ENV = "CRANE_LAB_OUT_DIR"
DEFAULT_OUT_DIR = "runs"

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_ABORTED = 3


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, DEFAULT_OUT_DIR))


def parse_overrides(items: Sequence[str]) -> dict:
    overrides = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ScenarioConfigError(f"--set expects section.key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    return overrides


def print_report(report: MetricsReport):
    for name, value in report.as_row().items():
        print(f"{name:>24}: {value if value != '' else '-'}")


def cmd_simulate(args) -> int:
    cfg = load_scenario(args.scenario)
    if args.set:
        cfg = apply_overrides(cfg, parse_overrides(args.set))
    if args.seed is not None:
        cfg = replace(cfg, scenario=replace(cfg.scenario, seed=args.seed))
    out = Path(args.out) if args.out else default_out_dir()
    try:
        trace = run_scenario(cfg, out)
    except SimulationAborted as exc:
        logger.error("Run aborted: %s (partial trace: %s)", exc, exc.csv_path)
        return EXIT_ABORTED
    report = evaluate_metrics(trace)
    print_report(report)
    return EXIT_NOT_CONVERGED if report.has_not_converged else EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_scenario(args.scenario)
    grid = load_grid(args.grid)
    out = Path(args.out) if args.out else default_out_dir()
    cells = sweep(cfg, grid, out, jobs=args.jobs)
    for cell in cells:
        if cell.ok:
            row = cell.report.as_row()
            print(f"{cell.cell_id} {cell.overrides} convergence={row['convergence_time'] or '-'} "
                  f"final_error={row['final_length_error']}%")
        else:
            print(f"{cell.cell_id} {cell.overrides} FAILED {cell.error}")
    if any(not cell.ok for cell in cells):
        return EXIT_ABORTED
    if any(cell.report.has_not_converged for cell in cells):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_metrics(args) -> int:
    report = evaluate_metrics(read_trace(args.trace))
    print_report(report)
    return EXIT_NOT_CONVERGED if report.has_not_converged else EXIT_OK


def cmd_view(args) -> int:
    from theme import get_theme
    from views import TraceVisualizer
    from visualizer import setup_backend

    trace = read_trace(args.trace)
    setup_backend()
    TraceVisualizer(trace, theme=get_theme(args.theme)).show()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crane-lab",
        description="Simulate vision-based crane payload estimation and sway damping.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    parser.add_argument("-d", "--debug", action="store_true", help="log every tick")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write its trace")
    p.add_argument("--scenario", required=True, help="scenario INI file")
    p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./{DEFAULT_OUT_DIR})")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override one scenario value; repeatable")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter grid over a scenario")
    p.add_argument("--scenario", required=True, help="template scenario INI file")
    p.add_argument("--grid", required=True, help="grid INI file with a [grid] section")
    p.add_argument("--out", help="output directory for traces and sweep_report.csv")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metrics", help="evaluate a recorded trace")
    p.add_argument("--trace", required=True, help="trace CSV")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("view", help="open a recorded trace in the interactive viewer")
    p.add_argument("--trace", required=True, help="trace CSV")
    p.add_argument("--theme", default="dark", help="viewer theme: dark, light or high_contrast")
    p.set_defaults(func=cmd_view)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioConfigError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return EXIT_BAD_INPUT
    except CraneLabError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ABORTED


if __name__ == "__main__":
    sys.exit(main())
