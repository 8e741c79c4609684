"""Parameter sweeps: the Cartesian product of a grid, one run per cell.

A grid file has a single ``[grid]`` section of dotted scenario keys::

    [grid]
    initial.phi_x_deg = 5, 10, 15, 20
    estimator.L0 = 0.5, 0.7, 1.4

Values are separated by ``|`` when the key's own value contains commas
(waypoints, R), otherwise by commas.
"""

import csv
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from errors import CraneLabError, ScenarioConfigError
from scenarios.config import ScenarioConfig, apply_overrides, read_ini
from scenarios.metrics import MetricsReport, evaluate_metrics
from scenarios.runner import run_scenario

logger = logging.getLogger(__name__)

REPORT_NAME = "sweep_report.csv"

Grid = Dict[str, List[str]]


@dataclass(frozen=True)
class SweepCell:
    """Outcome of one grid cell: a report, or the error that stopped it."""

    index: int
    cell_id: str
    overrides: Dict[str, str]
    report: Optional[MetricsReport] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def split_values(raw: str) -> List[str]:
    sep = "|" if "|" in raw else ","
    values = [v.strip() for v in raw.split(sep) if v.strip()]
    return values


def load_grid(path: Union[str, Path]) -> Grid:
    """Read a grid file.

    Raises:
    -------
    ScenarioConfigError
        If the file has no non-empty [grid] section or other sections
    """
    sections = read_ini(path)
    if set(sections) != {"grid"}:
        raise ScenarioConfigError(f"{path}: expected exactly one [grid] section")
    grid = {key: split_values(raw) for key, raw in sections["grid"].items()}
    if not grid or any(not values for values in grid.values()):
        raise ScenarioConfigError(f"{path}: grid is empty")
    return grid


def grid_cells(grid: Mapping[str, Sequence[str]]) -> List[Dict[str, str]]:
    """All override dicts of the grid, last key varying fastest."""
    if not grid:
        raise ScenarioConfigError("grid is empty")
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def run_cell(
    template: ScenarioConfig,
    index: int,
    overrides: Dict[str, str],
    out_dir: Optional[str] = None,
) -> SweepCell:
    """Run one cell; any error is captured on the returned SweepCell."""
    cell_id = f"{template.scenario.id}-c{index:03d}"
    try:
        cfg = apply_overrides(template, overrides)
        cfg = replace(cfg, scenario=replace(cfg.scenario, id=cell_id))
        report = evaluate_metrics(run_scenario(cfg, out_dir))
    except CraneLabError as exc:
        logger.warning("Sweep cell %s %s failed: %s", cell_id, overrides, exc)
        return SweepCell(index, cell_id, dict(overrides), error=f"{type(exc).__name__}: {exc}")
    except Exception as exc:
        logger.exception("Sweep cell %s %s failed unexpectedly", cell_id, overrides)
        return SweepCell(index, cell_id, dict(overrides), error=f"{type(exc).__name__}: {exc}")
    return SweepCell(index, cell_id, dict(overrides), report=report)


def sweep(
    template: ScenarioConfig,
    grid: Mapping[str, Sequence[str]],
    out_dir: Optional[Union[str, Path]] = None,
    jobs: int = 1,
) -> List[SweepCell]:
    """Run every cell of the grid and write ``sweep_report.csv`` to out_dir.

    Cells are independent; with jobs > 1 they run in worker processes.
    Results come back in grid order whatever the completion order.
    """
    cells = grid_cells(grid)
    out = str(out_dir) if out_dir is not None else None
    logger.info("Sweeping %d cells with %d job(s)", len(cells), jobs)
    if jobs <= 1:
        results = [run_cell(template, i, c, out) for i, c in enumerate(cells)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_cell, template, i, c, out) for i, c in enumerate(cells)]
            results = [f.result() for f in futures]
    if out_dir is not None:
        write_sweep_report(results, Path(out_dir) / REPORT_NAME)
    failed = sum(not r.ok for r in results)
    if failed:
        logger.warning("%d of %d sweep cells failed", failed, len(results))
    return results


def write_sweep_report(cells: Sequence[SweepCell], path: Union[str, Path]) -> Path:
    """One row per cell: id, parameter values, metrics or the error text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys = list(cells[0].overrides) if cells else []
    metric_names = [f.name for f in fields(MetricsReport) if f.name not in ("scenario_id", "seed")]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cell"] + keys + metric_names + ["error"])
        for cell in cells:
            row = cell.report.as_row() if cell.report is not None else {}
            writer.writerow(
                [cell.cell_id]
                + [cell.overrides.get(k, "") for k in keys]
                + [row.get(name, "") for name in metric_names]
                + [cell.error or ""]
            )
    logger.info("Wrote sweep report %s", path)
    return path
