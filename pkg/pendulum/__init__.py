"""Ground-truth payload dynamics."""

from .dynamics import (
    PayloadParams,
    PendulumState,
    SimState,
    cable_direction,
    joint_lag_trajectory,
    pendulum_accel,
    pendulum_energy,
    physics_steps_per_tick,
    propagate,
    rk4_step,
    step_ground_truth,
)

__all__ = [
    "PayloadParams",
    "PendulumState",
    "SimState",
    "cable_direction",
    "joint_lag_trajectory",
    "pendulum_accel",
    "pendulum_energy",
    "physics_steps_per_tick",
    "propagate",
    "rk4_step",
    "step_ground_truth",
]
