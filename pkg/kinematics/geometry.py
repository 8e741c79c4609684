"""Crane geometry and joint-state types."""

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class CraneGeometry:
    """Link lengths and linkage offsets of the knuckle boom crane.

    The defaults are the lab crane: king height l1, inner boom l2, the
    two-segment outer boom l3/l4 with fixed knuckle angle theta4, and the
    actuator mounting offsets of the inner (index 2) and outer (index 3)
    boom cylinders.

    Attributes:
    -----------
    l1, l2, l3, l4 : float
        Link lengths [m]
    a_b2, e_b2, a_p2, e_p2 : float
        Inner boom actuator base and piston offsets [m]
    a_b3, e_b3, a_p3, e_p3 : float
        Outer boom actuator base and piston offsets [m]
    theta4 : float
        Fixed angle between the outer boom segments [rad]
    c2, c3 : float
        Angle constants of the joint-angle relation [rad]
    actuator_margin : float
        Fraction of the geometric actuator stroke trimmed at each end
    max_condition : float
        Jacobian condition number above which the crane counts as singular
    """

    l1: float = 0.711
    l2: float = 1.5
    l3: float = 0.205
    l4: float = 0.992
    a_b2: float = 0.55
    e_b2: float = 0.154
    a_p2: float = 0.6
    e_p2: float = 0.13
    a_b3: float = 0.75
    e_b3: float = 0.16
    a_p3: float = 0.167
    e_p3: float = 0.076
    theta4: float = math.radians(-39.4)
    c2: float = math.pi / 2
    c3: float = math.pi
    actuator_margin: float = 0.01
    max_condition: float = 1e6

    def __post_init__(self):
        for name in ("l1", "l2", "l3", "l4"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("a_b2", "a_p2", "a_b3", "a_p3"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0 <= self.actuator_margin < 0.5:
            raise ValueError("actuator_margin must lie in [0, 0.5)")
        if self.max_condition <= 1:
            raise ValueError("max_condition must exceed 1")

    def linkage(self, i: int) -> Tuple[float, float, float, float]:
        """Return the derived linkage quantities of actuator i.

        Parameters:
        -----------
        i : int
            Joint index, 2 (inner boom) or 3 (outer boom)

        Returns:
        --------
        tuple
            (b1, b2, offset, c) where offset = atan(e_b/a_b) + atan(e_p/a_p)
        """
        if i == 2:
            a_b, e_b, a_p, e_p, c = self.a_b2, self.e_b2, self.a_p2, self.e_p2, self.c2
        elif i == 3:
            a_b, e_b, a_p, e_p, c = self.a_b3, self.e_b3, self.a_p3, self.e_p3, self.c3
        else:
            raise ValueError(f"joint index must be 2 or 3, got {i}")
        b1 = math.hypot(a_b, e_b)
        b2 = math.hypot(a_p, e_p)
        offset = math.atan(e_b / a_b) + math.atan(e_p / a_p)
        return b1, b2, offset, c

    @property
    def outer_arm(self) -> Tuple[float, float]:
        """Length and angle of the l3/l4 outer boom seen from the knuckle."""
        x = self.l3 + self.l4 * math.cos(self.theta4)
        y = self.l4 * math.sin(self.theta4)
        return math.hypot(x, y), math.atan2(y, x)


@dataclass
class JointState:
    """Crane generalized coordinates and their rates.

    q1 is the slew angle [rad]; q2, q3 are the actuator extensions [m].
    """

    q: np.ndarray = field(default_factory=lambda: np.zeros(3))
    qdot: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(3)
        self.qdot = np.asarray(self.qdot, dtype=float).reshape(3)

    @property
    def q1(self) -> float:
        return float(self.q[0])

    @property
    def q2(self) -> float:
        return float(self.q[1])

    @property
    def q3(self) -> float:
        return float(self.q[2])

    def copy(self) -> "JointState":
        return JointState(self.q.copy(), self.qdot.copy())


@dataclass(frozen=True)
class TipPose:
    """Crane-tip position p05 in the inertial frame (z pointing down)."""

    p05: np.ndarray

    @property
    def xy(self) -> np.ndarray:
        return self.p05[:2]

    @property
    def radius(self) -> float:
        return float(math.hypot(self.p05[0], self.p05[1]))
