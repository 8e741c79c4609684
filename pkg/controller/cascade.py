"""Cascade anti-sway controller.

An outer PD loop positions the crane tip, an inner loop feeds back the
cable rates as tip acceleration to damp the swing, and a first-order
velocity loop turns the acceleration command into the tip velocities the
velocity-controlled crane joints accept.
"""

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from kinematics import (
    CraneGeometry,
    JointState,
    forward_kinematics,
    joint_rates_from_tip_velocity,
    tip_jacobian,
)


@dataclass(frozen=True)
class ControllerGains:
    """Gains of the cascade controller.

    The outer PD gains are not stored: they follow from the current
    cable length through omega_s = omega0 / k_s, k_p = omega_s^2 and
    k_d = 2 zeta_s omega_s.

    Attributes:
    -----------
    zeta : float
        Relative damping of the swing loop, in (0, 1]
    zeta_s : float
        Relative damping of the tip position loop, in [0.7, 1]
    k_s : float
        Bandwidth separation omega0 / omega_s, at least 5
    T_v : float
        Velocity-loop time constant [s]
    v_max : float
        Tip velocity saturation per axis [m/s]
    windup_factor : float
        Integrated command w is clamped at windup_factor * v_max
    """

    zeta: float = 0.2
    zeta_s: float = 1.0
    k_s: float = 5.0
    T_v: float = 0.1
    v_max: float = 0.5
    windup_factor: float = 1.5

    def __post_init__(self):
        if not 0.0 < self.zeta <= 1.0:
            raise ValueError(f"zeta must lie in (0, 1], got {self.zeta}")
        if not 0.7 <= self.zeta_s <= 1.0:
            raise ValueError(f"zeta_s must lie in [0.7, 1], got {self.zeta_s}")
        if self.k_s < 5.0:
            raise ValueError(f"k_s must be at least 5, got {self.k_s}")
        if self.T_v <= 0 or self.v_max <= 0 or self.windup_factor < 1.0:
            raise ValueError("T_v and v_max must be positive and windup_factor >= 1")

    @staticmethod
    def omega0(L: float, g: float) -> float:
        return math.sqrt(g / L)

    def outer_gains(self, L: float, g: float) -> Tuple[float, float, float]:
        """Return (omega_s, k_p, k_d) for cable length L."""
        omega_s = self.omega0(L, g) / self.k_s
        return omega_s, omega_s * omega_s, 2.0 * self.zeta_s * omega_s


@dataclass
class VelocityLoopState:
    """Integrated acceleration command w and velocity-loop output v [m/s]."""

    w: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float).reshape(2)
        self.v = np.asarray(self.v, dtype=float).reshape(2)


@dataclass(frozen=True)
class ControlOutput:
    """Everything one control tick produces."""

    qdot_cmd: np.ndarray
    accel_cmd: np.ndarray
    vdot: np.ndarray
    u: np.ndarray
    velocity_loop: VelocityLoopState


def damping_accel(
    phidot: Tuple[float, float],
    L: float,
    gains: ControllerGains,
    u: Tuple[float, float] = (0.0, 0.0),
    g: float = 9.81,
) -> np.ndarray:
    """Tip acceleration that damps the swing, plus the outer-loop input u."""
    if L <= 0:
        raise ValueError("cable length must be positive")
    k = 2.0 * L * gains.zeta * gains.omega0(L, g)
    return np.array([k * phidot[1] + u[0], -k * phidot[0] + u[1]])


def outer_pd(
    tip: np.ndarray,
    desired: np.ndarray,
    gains: ControllerGains,
    L: float,
    g: float = 9.81,
) -> np.ndarray:
    """PD law on tip position (x5, y5) and velocity (xdot5, ydot5)."""
    _, k_p, k_d = gains.outer_gains(L, g)
    tip = np.asarray(tip, dtype=float)
    desired = np.asarray(desired, dtype=float)
    return k_p * (desired[:2] - tip[:2]) + k_d * (desired[2:4] - tip[2:4])


def velocity_loop_step(
    vls: VelocityLoopState,
    accel_cmd: np.ndarray,
    T_v: float,
    dt: float,
    v_max: float = math.inf,
    w_limit: float = math.inf,
) -> VelocityLoopState:
    """Integrate w by Euler, then v by the exact first-order response.

    w is clamped to +-w_limit and v saturated at +-v_max per axis.
    """
    if dt <= 0 or T_v <= 0:
        raise ValueError("dt and T_v must be positive")
    w = np.clip(vls.w + np.asarray(accel_cmd, dtype=float) * dt, -w_limit, w_limit)
    decay = math.exp(-dt / T_v)
    v = w + (vls.v - w) * decay
    return VelocityLoopState(w=w, v=np.clip(v, -v_max, v_max))


def tip_state(joints: JointState, geom: CraneGeometry) -> np.ndarray:
    """Measured (x5, y5, xdot5, ydot5) from joint encoders."""
    p = forward_kinematics(joints, geom).p05
    v = tip_jacobian(joints, geom) @ joints.qdot
    return np.array([p[0], p[1], v[0], v[1]])


def control_tick(
    ekf_out: np.ndarray,
    L_bar: float,
    tip: np.ndarray,
    reference: np.ndarray,
    gains: ControllerGains,
    vls: VelocityLoopState,
    joints: JointState,
    geom: CraneGeometry,
    dt: float,
    g: float = 9.81,
    damping_on: bool = True,
) -> ControlOutput:
    """One pass of the cascade: PD, swing damping, velocity loop, joint mapping.

    Parameters:
    -----------
    ekf_out : ndarray
        Filter state (phi_x, phi_y, phidot_x, phidot_y, n_x, n_y)
    L_bar : float
        Cable length used for omega0 [m]
    tip : ndarray
        Measured (x5, y5, xdot5, ydot5)
    reference : ndarray
        Desired (x_d, y_d, xdot_d, ydot_d)
    gains : ControllerGains
        Controller gains
    vls : VelocityLoopState
        Velocity-loop state before the tick
    joints : JointState
        Measured joints, for the Jacobian
    geom : CraneGeometry
        Crane geometry
    dt : float
        Control period [s]
    damping_on : bool
        If False the swing-damping term is left out

    Returns:
    --------
    ControlOutput
        Joint-rate commands, the commanded tip acceleration, the realized
        velocity-loop acceleration vdot (fed to the estimators) and the
        new velocity-loop state

    Raises:
    -------
    SingularConfiguration
        If the Jacobian cannot be inverted
    """
    u = outer_pd(tip, reference, gains, L_bar, g)
    if damping_on:
        accel_cmd = damping_accel(ekf_out[2:4], L_bar, gains, u, g)
    else:
        accel_cmd = u
    new_vls = velocity_loop_step(
        vls, accel_cmd, gains.T_v, dt, gains.v_max, gains.windup_factor * gains.v_max
    )
    vdot = (new_vls.v - vls.v) / dt
    qdot_cmd = joint_rates_from_tip_velocity(new_vls.v, joints, geom)
    return ControlOutput(
        qdot_cmd=qdot_cmd,
        accel_cmd=accel_cmd,
        vdot=vdot,
        u=u,
        velocity_loop=new_vls,
    )


def closed_loop_poles(gains: ControllerGains, L: float, g: float = 9.81) -> np.ndarray:
    """Roots of s^2 + 2 zeta omega0 s + omega0^2 of the damped swing loop."""
    w0 = gains.omega0(L, g)
    return np.roots([1.0, 2.0 * gains.zeta * w0, w0 * w0])


def notch_response(gains: ControllerGains, L: float, omega: float, g: float = 9.81) -> float:
    """|H(j omega)| of the tip-to-reference map (s^2 + w0^2)/(s^2 + 2 zeta w0 s + w0^2)."""
    w0 = gains.omega0(L, g)
    s = 1j * omega
    return float(abs((s * s + w0 * w0) / (s * s + 2.0 * gains.zeta * w0 * s + w0 * w0)))
