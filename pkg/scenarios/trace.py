"""Per-tick trace records and their versioned CSV format."""

import csv
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from errors import ScenarioConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
BOOL_COLUMNS = ("damping_on", "estimator_frozen", "measurement_valid")


@dataclass(frozen=True)
class TraceRecord:
    """One control tick of a closed-loop run.

    Angles are in radians, positions in metres. ``y1``/``y2`` are NaN on
    ticks without a valid measurement; ``L`` is the raw estimate 1/eta and
    ``L_bar`` its filtered value.
    """

    t: float
    phi_x: float
    phi_y: float
    phidot_x: float
    phidot_y: float
    phi_hat_x: float
    phi_hat_y: float
    phidot_hat_x: float
    phidot_hat_y: float
    n_hat_x: float
    n_hat_y: float
    y1: float
    y2: float
    sigma4_1: float
    sigma4_2: float
    x5: float
    y5: float
    x_d: float
    y_d: float
    v_x: float
    v_y: float
    w_x: float
    w_y: float
    vdot_x: float
    vdot_y: float
    eta: float
    gamma: float
    L: float
    L_bar: float
    damping_on: bool
    estimator_frozen: bool
    measurement_valid: bool


COLUMNS = tuple(f.name for f in dataclasses.fields(TraceRecord))


@dataclass
class Trace:
    """Ordered records of a run plus the metadata written to the CSV header."""

    scenario_id: str
    seed: int
    L_true: float
    g: float = 9.81
    records: List[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord):
        if self.records and not record.t > self.records[-1].t:
            raise ValueError(f"trace time must increase: {record.t} after {self.records[-1].t}")
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        """One column as a float array (booleans become 0.0/1.0)."""
        if name not in COLUMNS:
            raise KeyError(name)
        return np.array([float(getattr(r, name)) for r in self.records])

    def columns(self) -> Dict[str, np.ndarray]:
        return {name: self.column(name) for name in COLUMNS}

    @property
    def metadata(self) -> Dict[str, str]:
        return {
            "schema": str(SCHEMA_VERSION),
            "scenario": self.scenario_id,
            "seed": str(self.seed),
            "L_true": _fmt(self.L_true),
            "g": _fmt(self.g),
        }

    def write_csv(self, path: Union[str, Path]) -> Path:
        """Write the trace; the first line is the ``# schema=`` metadata comment."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = " ".join(f"{k}={v}" for k, v in self.metadata.items())
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# {header}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            for record in self.records:
                writer.writerow([_fmt(getattr(record, name)) for name in COLUMNS])
        logger.info("Wrote %d records to %s", len(self.records), path)
        return path


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".9g")


def trace_filename(scenario_id: str, seed: int) -> str:
    return f"{scenario_id}_seed{seed}.csv"


def read_trace(path: Union[str, Path]) -> Trace:
    """Load a CSV written by Trace.write_csv.

    Raises:
    -------
    ScenarioConfigError
        If the metadata line or the column header does not match schema 1
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith("#"):
            raise ScenarioConfigError(f"{path}: missing '# schema=' header line")
        meta = dict(item.split("=", 1) for item in first[1:].split() if "=" in item)
        if meta.get("schema") != str(SCHEMA_VERSION):
            raise ScenarioConfigError(f"{path}: unsupported schema {meta.get('schema')!r}")
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != COLUMNS:
            raise ScenarioConfigError(f"{path}: column header does not match schema {SCHEMA_VERSION}")
        trace = Trace(
            scenario_id=meta.get("scenario", path.stem),
            seed=int(meta.get("seed", 0)),
            L_true=float(meta.get("L_true", "nan")),
            g=float(meta.get("g", 9.81)),
        )
        for row in reader:
            values = {}
            for name, raw in zip(COLUMNS, row):
                values[name] = raw == "1" if name in BOOL_COLUMNS else float(raw)
            trace.records.append(TraceRecord(**values))
    return trace
