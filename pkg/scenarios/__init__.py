"""Scenario files, closed-loop runs, traces, metrics and sweeps."""

from .config import (
    EkfSettings,
    EstimatorConfig,
    Events,
    InitialConditions,
    ReferenceConfig,
    ScenarioConfig,
    ScenarioSettings,
    apply_overrides,
    load_scenario,
    parse_waypoints,
    scenario_from_mapping,
)
from .trace import COLUMNS, SCHEMA_VERSION, Trace, TraceRecord, read_trace, trace_filename
from .runner import initial_state, run_scenario
from .metrics import (
    MetricsReport,
    angle_settling_time,
    decay_rate_from_peaks,
    evaluate_metrics,
    fit_decay_envelope,
    length_convergence_time,
    settling_time,
)
from .sweep import SweepCell, grid_cells, load_grid, sweep, write_sweep_report

__all__ = [
    "COLUMNS",
    "SCHEMA_VERSION",
    "EkfSettings",
    "EstimatorConfig",
    "Events",
    "InitialConditions",
    "MetricsReport",
    "ReferenceConfig",
    "ScenarioConfig",
    "ScenarioSettings",
    "SweepCell",
    "Trace",
    "TraceRecord",
    "angle_settling_time",
    "apply_overrides",
    "decay_rate_from_peaks",
    "evaluate_metrics",
    "fit_decay_envelope",
    "grid_cells",
    "initial_state",
    "length_convergence_time",
    "load_grid",
    "load_scenario",
    "parse_waypoints",
    "read_trace",
    "run_scenario",
    "scenario_from_mapping",
    "settling_time",
    "sweep",
    "trace_filename",
    "write_sweep_report",
]
