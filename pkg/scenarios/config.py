"""Scenario configuration and its INI file format.

A scenario file has one section per concern; every key is optional and
falls back to the lab defaults::

    [scenario]
    id = damping-zeta-0.2
    seed = 7
    duration = 60

    [reference]
    waypoints = 1.0: 0.70, 1.80

    [events]
    damping_on = 20

Unknown sections or keys are rejected.
"""

import configparser
import dataclasses
import math
import typing
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from controller import ControllerGains
from errors import ScenarioConfigError
from estimation import EkfConfig, LengthEstimatorState
from kinematics import CraneGeometry
from pendulum import PayloadParams
from vision import CameraRig

LENGTH_SOURCES = ("estimate", "true")


@dataclass(frozen=True)
class ScenarioSettings:
    """Identity, timing and seed of a run."""

    id: str = "default"
    seed: int = 0
    duration: float = 30.0
    control_period: float = 0.05
    physics_dt: float = 0.001
    actuator_tau: float = 0.02


@dataclass(frozen=True)
class InitialConditions:
    """Initial crane pose and cable swing.

    The crane starts at rest with its tip at ``tip`` (solved by inverse
    kinematics) unless explicit joint coordinates ``q`` are given.
    """

    tip: Tuple[float, float, float] = (1.27, 1.27, -1.161)
    q: Optional[Tuple[float, float, float]] = None
    phi_x_deg: float = 0.0
    phi_y_deg: float = 0.0
    phidot_x: float = 0.0
    phidot_y: float = 0.0


@dataclass(frozen=True)
class ReferenceConfig:
    """Piecewise-constant tip references as (t, x_d, y_d) waypoints."""

    waypoints: Tuple[Tuple[float, float, float], ...] = ()

    def desired(self, t: float, start_xy: np.ndarray) -> np.ndarray:
        """(x_d, y_d, xdot_d, ydot_d) active at time t."""
        x, y = float(start_xy[0]), float(start_xy[1])
        for t_w, x_w, y_w in self.waypoints:
            if t_w <= t + 1e-12:
                x, y = x_w, y_w
        return np.array([x, y, 0.0, 0.0])

    @property
    def change_times(self) -> Tuple[float, ...]:
        return tuple(w[0] for w in self.waypoints)


@dataclass(frozen=True)
class EstimatorConfig:
    """Initial guess, bounds and tuning of the cable-length estimator."""

    L0: float = 0.5
    gamma0: float = 100.0
    beta: float = 0.5
    L_min: float = 0.3
    L_max: float = 1.5
    lambda0: float = 1.0
    tau_Lbar: float = 2.0

    def initial_state(self) -> LengthEstimatorState:
        return LengthEstimatorState.from_guess(
            self.L0,
            gamma0=self.gamma0,
            beta=self.beta,
            L_min=self.L_min,
            L_max=self.L_max,
            lambda0=self.lambda0,
            tau_Lbar=self.tau_Lbar,
        )


@dataclass(frozen=True)
class EkfSettings(EkfConfig):
    """Filter configuration plus the cable length the process model uses."""

    length_source: str = "estimate"


@dataclass(frozen=True)
class Events:
    """Time-triggered switches of a run [s]; None means never.

    The length estimate freezes at ``freeze_estimate_at``, or at damping
    activation when that is unset, unless ``keep_estimating`` is true.
    """

    damping_on: Optional[float] = None
    damping_off: Optional[float] = None
    freeze_estimate_at: Optional[float] = None
    keep_estimating: bool = False

    def damping_active(self, t: float) -> bool:
        if self.damping_on is None or t + 1e-12 < self.damping_on:
            return False
        return self.damping_off is None or t + 1e-12 < self.damping_off

    def estimate_frozen(self, t: float) -> bool:
        if self.keep_estimating:
            return False
        at = self.freeze_estimate_at if self.freeze_estimate_at is not None else self.damping_on
        return at is not None and t + 1e-12 >= at


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one closed-loop run needs."""

    scenario: ScenarioSettings = field(default_factory=ScenarioSettings)
    geometry: CraneGeometry = field(default_factory=CraneGeometry)
    payload: PayloadParams = field(default_factory=PayloadParams)
    rig: CameraRig = field(default_factory=CameraRig)
    initial: InitialConditions = field(default_factory=InitialConditions)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    controller: ControllerGains = field(default_factory=ControllerGains)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    ekf: EkfSettings = field(default_factory=EkfSettings)
    events: Events = field(default_factory=Events)

    def validate(self) -> "ScenarioConfig":
        """Check cross-section invariants; returns self for chaining.

        Raises:
        -------
        ScenarioConfigError
            If a time lies outside the run or the length guess is out of bounds
        """
        s = self.scenario
        if s.duration <= 0:
            raise ScenarioConfigError("duration must be positive")
        if s.control_period <= 0 or s.physics_dt <= 0:
            raise ScenarioConfigError("control_period and physics_dt must be positive")
        times = list(self.reference.change_times)
        times += [
            t
            for t in (self.events.damping_on, self.events.damping_off, self.events.freeze_estimate_at)
            if t is not None
        ]
        for t in times:
            if not 0.0 <= t <= s.duration:
                raise ScenarioConfigError(f"time {t} s outside the run [0, {s.duration}] s")
        est = self.estimator
        if not est.L_min <= est.L0 <= est.L_max:
            raise ScenarioConfigError(
                f"initial length guess {est.L0} m outside [{est.L_min}, {est.L_max}] m"
            )
        if self.ekf.length_source not in LENGTH_SOURCES:
            raise ScenarioConfigError(f"length_source must be one of {LENGTH_SOURCES}")
        return self


SECTIONS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_floats(raw: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in raw.replace(";", ",").split(",") if v.strip())


def parse_waypoints(raw: str) -> Tuple[Tuple[float, float, float], ...]:
    """Parse ``t: x, y; t: x, y`` into (t, x, y) triples sorted by time."""
    waypoints = []
    for chunk in raw.split(";"):
        if not chunk.strip():
            continue
        t_part, _, xy_part = chunk.partition(":")
        xy = _parse_floats(xy_part)
        if len(xy) != 2:
            raise ValueError(f"waypoint {chunk.strip()!r} needs 't: x, y'")
        waypoints.append((float(t_part), xy[0], xy[1]))
    return tuple(sorted(waypoints))


def _parse_value(raw: str, annotation, section: str, key: str):
    if section == "reference" and key == "waypoints":
        return parse_waypoints(raw)
    if section == "ekf" and key == "r":
        values = _parse_floats(raw)
        if len(values) != 4:
            raise ValueError("r needs four values (row-major 2x2)")
        return ((values[0], values[1]), (values[2], values[3]))

    optional = False
    origin = typing.get_origin(annotation)
    if origin is Union:
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        optional, annotation = True, args[0]
        origin = typing.get_origin(annotation)
    if optional and raw.strip().lower() in ("", "none", "never"):
        return None
    if annotation is bool:
        return _parse_bool(raw)
    if annotation is int:
        return int(raw)
    if annotation is float:
        value = raw.strip().lower()
        return math.inf if value in ("inf", "infinity") else float(raw)
    if annotation is str:
        return raw.strip()
    if origin is tuple:
        values = _parse_floats(raw)
        args = typing.get_args(annotation)
        if args and args[-1] is not Ellipsis and len(values) != len(args):
            raise ValueError(f"expected {len(args)} values, got {len(values)}")
        if args and args[0] is int:
            return tuple(int(v) for v in values)
        return values
    raise ValueError(f"unsupported field type {annotation!r}")


def _section_fields(section: str) -> Dict[str, dataclasses.Field]:
    cls = SECTIONS[section].default_factory
    hints = typing.get_type_hints(cls)
    return {f.name: (f, hints[f.name]) for f in dataclasses.fields(cls)}


def scenario_from_mapping(
    mapping: Mapping[str, Mapping[str, str]], base: Optional[ScenarioConfig] = None
) -> ScenarioConfig:
    """Build a ScenarioConfig from {section: {key: raw string}}.

    Raises:
    -------
    ScenarioConfigError
        On unknown sections or keys and on values that fail to parse or
        violate a section invariant
    """
    cfg = base if base is not None else ScenarioConfig()
    for section, entries in mapping.items():
        if section not in SECTIONS:
            raise ScenarioConfigError(f"unknown section [{section}]")
        known = _section_fields(section)
        updates = {}
        for key, raw in entries.items():
            if key not in known:
                raise ScenarioConfigError(f"unknown key {key!r} in [{section}]")
            _, annotation = known[key]
            try:
                updates[key] = _parse_value(str(raw), annotation, section, key)
            except ValueError as exc:
                raise ScenarioConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
        try:
            cfg = replace(cfg, **{section: replace(getattr(cfg, section), **updates)})
        except ValueError as exc:
            raise ScenarioConfigError(f"[{section}]: {exc}") from exc
    return cfg


def read_ini(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    """Read an INI file into nested dicts, keeping key case."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    path = Path(path)
    if not path.is_file():
        raise ScenarioConfigError(f"no such file: {path}")
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ScenarioConfigError(f"{path}: {exc}") from exc
    if parser.defaults():
        raise ScenarioConfigError(f"{path}: [DEFAULT] entries are not supported")
    return {name: dict(parser.items(name)) for name in parser.sections()}


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """Load and validate a scenario file."""
    return scenario_from_mapping(read_ini(path)).validate()


def apply_overrides(cfg: ScenarioConfig, overrides: Mapping[str, str]) -> ScenarioConfig:
    """Apply {"section.key": raw value} overrides, as used by sweep grids."""
    mapping: Dict[str, Dict[str, str]] = {}
    for dotted, raw in overrides.items():
        section, sep, key = dotted.partition(".")
        if not sep:
            raise ScenarioConfigError(f"override {dotted!r} must be section.key")
        mapping.setdefault(section, {})[key] = raw
    return scenario_from_mapping(mapping, base=cfg).validate()
