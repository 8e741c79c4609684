"""Spherical-pendulum payload driven by crane-tip acceleration.

The cable hangs from the crane tip with orientation R06 = R_x(phi_x) R_y(phi_y).
Integration is classical fourth-order Runge-Kutta on plain floats; the
crane joints follow their rate commands through a first-order lag that is
solved exactly, so the joint trajectory within a control period is known
before the payload is stepped.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from controller.cascade import VelocityLoopState
from errors import ConeSingularity
from kinematics import CraneGeometry, JointState, tip_jacobian

logger = logging.getLogger(__name__)

DEFAULT_CONE_EPS = 1e-3

PendulumTuple = Tuple[float, float, float, float]


@dataclass(frozen=True)
class PendulumState:
    """Cable angles [rad] and their rates [rad/s]."""

    phi_x: float = 0.0
    phi_y: float = 0.0
    phidot_x: float = 0.0
    phidot_y: float = 0.0

    def as_tuple(self) -> PendulumTuple:
        return (self.phi_x, self.phi_y, self.phidot_x, self.phidot_y)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    @classmethod
    def from_sequence(cls, values) -> "PendulumState":
        px, py, wx, wy = (float(v) for v in values)
        return cls(px, py, wx, wy)


@dataclass(frozen=True)
class PayloadParams:
    """Lumped payload mass [kg], true cable length [m] and gravity [m/s^2]."""

    m: float = 12.7
    L_true: float = 1.05
    g: float = 9.81

    def __post_init__(self):
        if self.m <= 0 or self.L_true <= 0 or self.g <= 0:
            raise ValueError("payload mass, cable length and gravity must be positive")

    @property
    def omega0(self) -> float:
        return math.sqrt(self.g / self.L_true)


@dataclass
class SimState:
    """Ground truth of one closed-loop run at a control tick."""

    t: float = 0.0
    joints: JointState = field(default_factory=JointState)
    pendulum: PendulumState = field(default_factory=PendulumState)
    tip_accel: np.ndarray = field(default_factory=lambda: np.zeros(2))
    velocity_loop: VelocityLoopState = field(default_factory=VelocityLoopState)


def cable_direction(phi_x: float, phi_y: float) -> np.ndarray:
    """Unit vector from the crane tip towards the payload."""
    sx, cx = math.sin(phi_x), math.cos(phi_x)
    sy, cy = math.sin(phi_y), math.cos(phi_y)
    return np.array([sy, -sx * cy, cx * cy])


def _check_cone(phi_y: float, cone_eps: float):
    if abs(phi_y) >= math.pi / 2 - cone_eps:
        raise ConeSingularity(
            f"|phi_y| = {abs(phi_y):.6f} rad reached the cos(phi_y) guard of {cone_eps:g} rad"
        )


def _accel(
    phi_x: float,
    phi_y: float,
    phidot_x: float,
    phidot_y: float,
    ax: float,
    ay: float,
    L: float,
    g: float,
    cone_eps: float,
) -> Tuple[float, float]:
    _check_cone(phi_y, cone_eps)
    sx, cx = math.sin(phi_x), math.cos(phi_x)
    sy, cy = math.sin(phi_y), math.cos(phi_y)
    w2 = g / L
    ddx = (2.0 * phidot_x * phidot_y * sy + ay * cx / L - w2 * sx) / cy
    ddy = -w2 * cx * sy - phidot_x * phidot_x * sy * cy - (ax * cy + ay * sx * sy) / L
    return ddx, ddy


def pendulum_accel(
    s: PendulumState,
    tip_accel: Tuple[float, float],
    L: float,
    g: float,
    cone_eps: float = DEFAULT_CONE_EPS,
) -> Tuple[float, float]:
    """Angular accelerations of the cable for a given tip acceleration.

    Parameters:
    -----------
    s : PendulumState
        Current cable angles and rates
    tip_accel : tuple
        Horizontal tip acceleration (vdot_x, vdot_y) [m/s^2]
    L : float
        Cable length [m]
    g : float
        Gravity [m/s^2]
    cone_eps : float
        Guard band below |phi_y| = pi/2 [rad]

    Returns:
    --------
    tuple
        (phiddot_x, phiddot_y) [rad/s^2]

    Raises:
    -------
    ConeSingularity
        If |phi_y| >= pi/2 - cone_eps
    """
    return _accel(
        s.phi_x, s.phi_y, s.phidot_x, s.phidot_y,
        float(tip_accel[0]), float(tip_accel[1]), L, g, cone_eps,
    )


def rk4_step(
    x: PendulumTuple,
    accel: Tuple[float, float],
    L: float,
    g: float,
    h: float,
    cone_eps: float = DEFAULT_CONE_EPS,
) -> PendulumTuple:
    """One classical Runge-Kutta step with the tip acceleration held constant."""
    ax, ay = accel
    px, py, wx, wy = x

    a1x, a1y = _accel(px, py, wx, wy, ax, ay, L, g, cone_eps)
    hh = 0.5 * h
    a2x, a2y = _accel(
        px + hh * wx, py + hh * wy, wx + hh * a1x, wy + hh * a1y, ax, ay, L, g, cone_eps
    )
    w2x, w2y = wx + hh * a1x, wy + hh * a1y
    a3x, a3y = _accel(
        px + hh * w2x, py + hh * w2y, wx + hh * a2x, wy + hh * a2y, ax, ay, L, g, cone_eps
    )
    w3x, w3y = wx + hh * a2x, wy + hh * a2y
    a4x, a4y = _accel(
        px + h * w3x, py + h * w3y, wx + h * a3x, wy + h * a3y, ax, ay, L, g, cone_eps
    )
    w4x, w4y = wx + h * a3x, wy + h * a3y

    h6 = h / 6.0
    return (
        px + h6 * (wx + 2.0 * w2x + 2.0 * w3x + w4x),
        py + h6 * (wy + 2.0 * w2y + 2.0 * w3y + w4y),
        wx + h6 * (a1x + 2.0 * a2x + 2.0 * a3x + a4x),
        wy + h6 * (a1y + 2.0 * a2y + 2.0 * a3y + a4y),
    )


def propagate(
    s: PendulumState,
    L: float,
    g: float,
    duration: float,
    dt: float,
    tip_accel: Tuple[float, float] = (0.0, 0.0),
    cone_eps: float = DEFAULT_CONE_EPS,
    record: bool = False,
) -> Tuple[PendulumState, Optional[np.ndarray]]:
    """Integrate the payload under a constant tip acceleration.

    Returns the final state and, with ``record``, an (n+1, 5) array of
    [t, phi_x, phi_y, phidot_x, phidot_y] rows.
    """
    n = int(round(duration / dt))
    x = s.as_tuple()
    rows = [(0.0,) + x] if record else None
    for k in range(n):
        x = rk4_step(x, tip_accel, L, g, dt, cone_eps)
        if record:
            rows.append(((k + 1) * dt,) + x)
    samples = np.array(rows) if record else None
    return PendulumState.from_sequence(x), samples


def pendulum_energy(
    s: PendulumState,
    payload: PayloadParams,
    tip_velocity: Tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> float:
    """Kinetic plus gravitational energy of the payload [J]."""
    L = payload.L_true
    sx, cx = math.sin(s.phi_x), math.cos(s.phi_x)
    sy, cy = math.sin(s.phi_y), math.cos(s.phi_y)
    rel = L * np.array([
        cy * s.phidot_y,
        -cx * cy * s.phidot_x + sx * sy * s.phidot_y,
        -sx * cy * s.phidot_x - cx * sy * s.phidot_y,
    ])
    v = np.asarray(tip_velocity, dtype=float) + rel
    return 0.5 * payload.m * float(v @ v) - payload.m * payload.g * L * cx * cy


def physics_steps_per_tick(control_period: float, physics_dt: float) -> int:
    """Number of physics steps in one control period.

    Raises:
    -------
    ValueError
        If the control period is not an integer multiple of the physics step
    """
    if control_period <= 0 or physics_dt <= 0:
        raise ValueError("control period and physics step must be positive")
    n = int(round(control_period / physics_dt))
    if n < 1 or abs(n * physics_dt - control_period) > 1e-9 * control_period:
        raise ValueError(
            f"control period {control_period} s is not a multiple of the physics step {physics_dt} s"
        )
    return n


def joint_lag_trajectory(
    joints: JointState, commands: np.ndarray, times: np.ndarray, tau: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Exact joint positions and rates under a first-order rate lag.

    Returns arrays of shape (len(times), 3).
    """
    cmd = np.asarray(commands, dtype=float)
    t = np.asarray(times, dtype=float)[:, None]
    gap = joints.qdot - cmd
    if tau > 0:
        decay = np.exp(-t / tau)
        qdot = cmd + gap * decay
        q = joints.q + cmd * t + gap * tau * (1.0 - decay)
    else:
        qdot = np.broadcast_to(cmd, (t.shape[0], 3)).copy()
        q = joints.q + cmd * t
    return q, qdot


def step_ground_truth(
    state: SimState,
    commands: np.ndarray,
    dt: float,
    geom: CraneGeometry,
    payload: PayloadParams,
    physics_dt: float = 1e-3,
    actuator_tau: float = 0.02,
    cone_eps: float = DEFAULT_CONE_EPS,
) -> SimState:
    """Advance crane and payload over one control period with held commands.

    The joint rates approach ``commands`` through the actuator lag. The
    tip velocity J(q) qdot is evaluated at every physics step (J linearly
    interpolated between the period's end points) and its difference
    quotient is the horizontal tip acceleration held during that RK4 step.

    Parameters:
    -----------
    state : SimState
        Ground truth at the start of the period
    commands : ndarray
        Joint-rate commands (qdot1, qdot2, qdot3)
    dt : float
        Control period [s]
    geom : CraneGeometry
        Crane geometry
    payload : PayloadParams
        Payload parameters
    physics_dt : float
        Physics step [s]; dt must be an integer multiple of it
    actuator_tau : float
        Joint-rate lag time constant [s]

    Returns:
    --------
    SimState
        Ground truth at the end of the period

    Raises:
    -------
    ConeSingularity
        If the cable swings into the phi_y guard band
    """
    n = physics_steps_per_tick(dt, physics_dt)
    h = dt / n
    commands = np.asarray(commands, dtype=float)
    times = np.arange(n + 1) * h
    q, qdot = joint_lag_trajectory(state.joints, commands, times, actuator_tau)

    if not (np.any(state.joints.qdot) or np.any(commands)):
        accel = np.zeros((n, 2))
    else:
        J0 = tip_jacobian(state.joints, geom)
        J1 = tip_jacobian(JointState(q[-1], qdot[-1]), geom)
        weights = (times / dt)[:, None, None]
        J = J0 + (J1 - J0) * weights
        v = np.einsum("kij,kj->ki", J, qdot)
        accel = np.diff(v[:, :2], axis=0) / h

    L, g = payload.L_true, payload.g
    x = state.pendulum.as_tuple()
    for k in range(n):
        x = rk4_step(x, (accel[k, 0], accel[k, 1]), L, g, h, cone_eps)

    return replace(
        state,
        t=state.t + dt,
        joints=JointState(q[-1], qdot[-1]),
        pendulum=PendulumState.from_sequence(x),
        tip_accel=accel.mean(axis=0),
    )
