"""Crane kinematics: joint angles, tip pose, Jacobian and its inverses."""

from .geometry import CraneGeometry, JointState, TipPose
from .crane import (
    actuator_range,
    forward_kinematics,
    inverse_kinematics,
    joint_angle_alpha,
    joint_rates_from_tip_velocity,
    rotation_chain,
    slew_rotation,
    tip_jacobian,
    tip_velocity,
)

__all__ = [
    "CraneGeometry",
    "JointState",
    "TipPose",
    "actuator_range",
    "forward_kinematics",
    "inverse_kinematics",
    "joint_angle_alpha",
    "joint_rates_from_tip_velocity",
    "rotation_chain",
    "slew_rotation",
    "tip_jacobian",
    "tip_velocity",
]
