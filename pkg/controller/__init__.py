"""Cascade anti-sway controller."""

from .cascade import (
    ControlOutput,
    ControllerGains,
    VelocityLoopState,
    closed_loop_poles,
    control_tick,
    damping_accel,
    notch_response,
    outer_pd,
    tip_state,
    velocity_loop_step,
)

__all__ = [
    "ControlOutput",
    "ControllerGains",
    "VelocityLoopState",
    "closed_loop_poles",
    "control_tick",
    "damping_accel",
    "notch_response",
    "outer_pd",
    "tip_state",
    "velocity_loop_step",
]
