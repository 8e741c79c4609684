"""Forward, differential and inverse kinematics of the knuckle boom crane.

Frames follow the usual chain: frame 1 slews with the king about the
inertial vertical, frames 2 and 3 carry the inner and outer boom, frame 4
the bent tip segment, and frame 5 sits at the crane tip with the inertial
orientation. The inertial z-axis points down.
"""

import math
from typing import List, Tuple

import numpy as np

from errors import OutOfReach, SingularConfiguration
from kinematics.geometry import CraneGeometry, JointState, TipPose

ARCCOS_TOLERANCE = 1e-12


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix, skew(a) @ b == a x b."""
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


# Constant part of the slew rotation: R01 = R_x(pi) R_z(-pi/2) R_z(q1)
_R01_BASE = rot_x(math.pi) @ rot_z(-math.pi / 2)
_R12_BASE = rot_x(math.pi / 2)


def slew_rotation(q1: float) -> np.ndarray:
    """Rotation from frame 1 (crane king) to the inertial frame."""
    return _R01_BASE @ rot_z(q1)


def actuator_range(i: int, geom: CraneGeometry, margin: bool = True) -> Tuple[float, float]:
    """Admissible extension interval of actuator i.

    Parameters:
    -----------
    i : int
        Actuator index, 2 or 3
    geom : CraneGeometry
        Crane geometry
    margin : bool
        Trim ``geom.actuator_margin`` of the stroke at each end

    Returns:
    --------
    tuple
        (q_min, q_max) [m]
    """
    b1, b2, _, _ = geom.linkage(i)
    lo, hi = abs(b1 - b2), b1 + b2
    if margin:
        trim = geom.actuator_margin * (hi - lo)
        lo, hi = lo + trim, hi - trim
    return lo, hi


def joint_angle_alpha(q_i: float, i: int, geom: CraneGeometry) -> Tuple[float, float]:
    """Boom angle alpha_i produced by actuator extension q_i.

    Parameters:
    -----------
    q_i : float
        Actuator extension [m]
    i : int
        Joint index, 2 or 3
    geom : CraneGeometry
        Crane geometry

    Returns:
    --------
    tuple
        (alpha_i [rad], d alpha_i / d q_i [rad/m])

    Raises:
    -------
    OutOfReach
        If the extension is geometrically impossible
    """
    b1, b2, offset, c = geom.linkage(i)
    x = (q_i * q_i - b1 * b1 - b2 * b2) / (-2.0 * b1 * b2)
    if abs(x) > 1.0 + ARCCOS_TOLERANCE:
        raise OutOfReach(
            f"actuator {i} extension {q_i:.6f} m outside "
            f"[{abs(b1 - b2):.6f}, {b1 + b2:.6f}] m"
        )
    x = min(1.0, max(-1.0, x))
    alpha = math.acos(x) + offset - c
    root = math.sqrt(1.0 - x * x)
    dalpha = q_i / (b1 * b2 * root) if root > 0.0 else math.inf
    return alpha, dalpha


def extension_from_alpha(alpha: float, i: int, geom: CraneGeometry) -> float:
    """Invert :func:`joint_angle_alpha` within the admissible actuator range."""
    b1, b2, offset, c = geom.linkage(i)
    theta = alpha - offset + c
    if not 0.0 <= theta <= math.pi:
        raise OutOfReach(f"boom angle {alpha:.6f} rad not producible by actuator {i}")
    q_sq = b1 * b1 + b2 * b2 - 2.0 * b1 * b2 * math.cos(theta)
    q_i = math.sqrt(max(q_sq, 0.0))
    lo, hi = actuator_range(i, geom)
    if not lo <= q_i <= hi:
        raise OutOfReach(
            f"actuator {i} extension {q_i:.6f} m outside admissible [{lo:.6f}, {hi:.6f}] m"
        )
    return q_i


def rotation_chain(q: JointState, geom: CraneGeometry) -> List[np.ndarray]:
    """Relative rotations [R01, R12, R23, R34] of the kinematic chain."""
    alpha2, _ = joint_angle_alpha(q.q2, 2, geom)
    alpha3, _ = joint_angle_alpha(q.q3, 3, geom)
    return [
        slew_rotation(q.q1),
        _R12_BASE @ rot_z(alpha2),
        rot_z(alpha3),
        rot_z(geom.theta4),
    ]


def _chain(q: JointState, geom: CraneGeometry):
    """Absolute rotations, frame origins and alpha derivatives."""
    alpha2, dalpha2 = joint_angle_alpha(q.q2, 2, geom)
    alpha3, dalpha3 = joint_angle_alpha(q.q3, 3, geom)

    R01 = slew_rotation(q.q1)
    R02 = R01 @ _R12_BASE @ rot_z(alpha2)
    R03 = R02 @ rot_z(alpha3)
    R04 = R03 @ rot_z(geom.theta4)

    p02 = R01 @ np.array([0.0, 0.0, geom.l1])
    p03 = p02 + R02 @ np.array([geom.l2, 0.0, 0.0])
    p04 = p03 + R03 @ np.array([geom.l3, 0.0, 0.0])
    p05 = p04 + R04 @ np.array([geom.l4, 0.0, 0.0])
    return (R01, R02, R03), (p02, p03, p05), (dalpha2, dalpha3)


def forward_kinematics(q: JointState, geom: CraneGeometry) -> TipPose:
    """Crane-tip position in the inertial frame.

    Raises:
    -------
    OutOfReach
        If either actuator extension is impossible
    """
    _, (_, _, p05), _ = _chain(q, geom)
    return TipPose(p05)


def tip_jacobian(q: JointState, geom: CraneGeometry) -> np.ndarray:
    """Tip Jacobian J with v05 = J @ qdot.

    Column i is z_i x p_i5 of the rotating joint, scaled by
    d alpha_i / d q_i for the two actuator-driven booms.
    """
    (R01, R02, R03), (p02, p03, p05), (dalpha2, dalpha3) = _chain(q, geom)
    J = np.empty((3, 3))
    J[:, 0] = skew(R01[:, 2]) @ p05
    J[:, 1] = (skew(R02[:, 2]) @ (p05 - p02)) * dalpha2
    J[:, 2] = (skew(R03[:, 2]) @ (p05 - p03)) * dalpha3
    return J


def tip_velocity(q: JointState, geom: CraneGeometry) -> np.ndarray:
    """Inertial tip velocity of a moving crane."""
    return tip_jacobian(q, geom) @ q.qdot


def joint_rates_from_tip_velocity(
    v_xy: np.ndarray, q: JointState, geom: CraneGeometry
) -> np.ndarray:
    """Joint rates that move the tip horizontally with velocity v_xy.

    The vertical tip velocity is always commanded as zero.

    Raises:
    -------
    SingularConfiguration
        If cond(J) exceeds ``geom.max_condition``
    """
    J = tip_jacobian(q, geom)
    condition = np.linalg.cond(J)
    if not condition <= geom.max_condition:
        raise SingularConfiguration(
            f"tip Jacobian condition number {condition:.3g} exceeds {geom.max_condition:.3g}",
            condition=float(condition),
        )
    v = np.array([v_xy[0], v_xy[1], 0.0])
    return np.linalg.solve(J, v)


def inverse_kinematics(p05: np.ndarray, geom: CraneGeometry) -> JointState:
    """Joint coordinates placing the tip at p05, outer boom folded below the inner boom.

    Raises:
    -------
    OutOfReach
        If p05 is outside the workspace or needs an inadmissible extension
    """
    x, y, z = (float(v) for v in p05)
    q1 = math.atan2(x, y)
    rho = math.hypot(x, y)
    h = -z - geom.l1

    m, mu = geom.outer_arm
    r_sq = rho * rho + h * h
    c = (r_sq - geom.l2 * geom.l2 - m * m) / (2.0 * geom.l2 * m)
    if abs(c) > 1.0:
        raise OutOfReach(f"tip {np.round(p05, 4)} outside the boom reach")
    bend = -math.acos(c)
    alpha3 = bend - mu
    wx = geom.l2 + m * math.cos(bend)
    wy = m * math.sin(bend)
    alpha2 = math.atan2(h, rho) - math.atan2(wy, wx)

    q2 = extension_from_alpha(alpha2, 2, geom)
    q3 = extension_from_alpha(alpha3, 3, geom)
    return JointState(np.array([q1, q2, q3]))
