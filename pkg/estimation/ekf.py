"""Extended Kalman filter for the cable angles, rates and measurement biases.

State z = (phi_x, phi_y, phidot_x, phidot_y, n_x, n_y). The biases are
random walks, the measurement is h(z) = (phi_x + n_x, phi_y + n_y) and the
input is the horizontal tip acceleration.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import IllConditionedInnovation
from pendulum import PendulumState, pendulum_accel
from pendulum.dynamics import DEFAULT_CONE_EPS


STATE_DIM = 6
H = np.array([
    [1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
])

DEFAULT_Q_DIAG = (0.3e-4, 0.3e-4, 5e-4, 5e-4, 1e-4, 1e-4)
DEFAULT_R = ((3.77597e-3, -2.10312e-3), (-2.10312e-3, 1.25147e-3))


@dataclass(frozen=True)
class EkfConfig:
    """Covariances, initial condition and discretization of the filter.

    Attributes:
    -----------
    q_diag : tuple
        Diagonal of the process covariance Q
    r : tuple
        2x2 measurement covariance R, row-major nested tuple
    z0 : tuple
        Initial state estimate
    p0_diag : tuple
        Diagonal of the initial covariance
    predict_substeps : int
        Euler substeps per prediction; 1 gives z + f(z) dt
    max_condition : float
        Largest acceptable condition number of R + H P H^T
    """

    q_diag: Tuple[float, ...] = DEFAULT_Q_DIAG
    r: Tuple[Tuple[float, float], Tuple[float, float]] = DEFAULT_R
    z0: Tuple[float, ...] = (0.0,) * STATE_DIM
    p0_diag: Tuple[float, ...] = (0.0,) * STATE_DIM
    predict_substeps: int = 10
    max_condition: float = 1e12
    cone_eps: float = DEFAULT_CONE_EPS

    def __post_init__(self):
        if len(self.q_diag) != STATE_DIM or len(self.z0) != STATE_DIM or len(self.p0_diag) != STATE_DIM:
            raise ValueError("q_diag, z0 and p0_diag need six entries")
        if any(v < 0 for v in self.q_diag) or any(v < 0 for v in self.p0_diag):
            raise ValueError("covariance diagonals must be non-negative")
        R = np.asarray(self.r, dtype=float)
        if R.shape != (2, 2) or not np.allclose(R, R.T):
            raise ValueError("r must be a symmetric 2x2 matrix")
        if self.predict_substeps < 1:
            raise ValueError("predict_substeps must be at least 1")

    def initial_state(self, dt: float) -> "EkfState":
        return EkfState(
            z_hat=np.array(self.z0, dtype=float),
            P=np.diag(np.array(self.p0_diag, dtype=float)),
            Q=np.diag(np.array(self.q_diag, dtype=float)),
            R=np.array(self.r, dtype=float),
            dt=dt,
            substeps=self.predict_substeps,
            max_condition=self.max_condition,
            cone_eps=self.cone_eps,
        )


@dataclass(frozen=True)
class EkfState:
    """Estimate, covariance and tuning of one filter instance."""

    z_hat: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    dt: float
    substeps: int = 10
    max_condition: float = 1e12
    cone_eps: float = DEFAULT_CONE_EPS
    innovation: Optional[np.ndarray] = None
    innovation_cov: Optional[np.ndarray] = None

    @property
    def angles(self) -> np.ndarray:
        return self.z_hat[0:2]

    @property
    def rates(self) -> np.ndarray:
        return self.z_hat[2:4]

    @property
    def biases(self) -> np.ndarray:
        return self.z_hat[4:6]


def _dynamics(z: np.ndarray, a: Sequence[float], L: float, g: float, cone_eps: float) -> np.ndarray:
    ddx, ddy = pendulum_accel(
        PendulumState(z[0], z[1], z[2], z[3]), a, L, g, cone_eps
    )
    return np.array([z[2], z[3], ddx, ddy, 0.0, 0.0])


def process_jacobian(
    z: np.ndarray, a: Sequence[float], L: float, g: float = 9.81
) -> np.ndarray:
    """Continuous-time Jacobian A = df/dz of the pendulum-plus-bias model."""
    px, py, wx, wy = z[0], z[1], z[2], z[3]
    ax, ay = a[0], a[1]
    sx, cx = math.sin(px), math.cos(px)
    sy, cy = math.sin(py), math.cos(py)
    w2 = g / L
    num = 2.0 * wx * wy * sy + ay * cx / L - w2 * sx

    A = np.zeros((STATE_DIM, STATE_DIM))
    A[0, 2] = 1.0
    A[1, 3] = 1.0
    A[2, 0] = (-ay * sx / L - w2 * cx) / cy
    A[2, 1] = 2.0 * wx * wy + num * sy / (cy * cy)
    A[2, 2] = 2.0 * wy * sy / cy
    A[2, 3] = 2.0 * wx * sy / cy
    A[3, 0] = w2 * sx * sy - ay * cx * sy / L
    A[3, 1] = -w2 * cx * cy - wx * wx * math.cos(2.0 * py) + (ax * sy - ay * sx * cy) / L
    A[3, 2] = -2.0 * wx * sy * cy
    return A


def process_model(
    z: np.ndarray,
    a: Sequence[float],
    L: float,
    dt: float,
    g: float = 9.81,
    substeps: int = 1,
    cone_eps: float = DEFAULT_CONE_EPS,
) -> Tuple[np.ndarray, np.ndarray]:
    """Discretized transition z_next = f_k(z) and its Jacobian F.

    With ``substeps`` n > 1 the Euler step z + f(z) dt/n is applied n
    times and F is the product of the substep Jacobians.

    Raises:
    -------
    ConeSingularity
        If |phi_y| enters the guard band
    """
    h = dt / substeps
    eye = np.eye(STATE_DIM)
    z_next = np.asarray(z, dtype=float).copy()
    F = eye.copy()
    for _ in range(substeps):
        F = (eye + process_jacobian(z_next, a, L, g) * h) @ F
        z_next = z_next + _dynamics(z_next, a, L, g, cone_eps) * h
    return z_next, F


def ekf_predict(s: EkfState, a_k: Sequence[float], L: float, g: float = 9.81) -> EkfState:
    """Time update: z_bar = f(z_hat), P_bar = F P F^T + Q."""
    z_bar, F = process_model(s.z_hat, a_k, L, s.dt, g, s.substeps, s.cone_eps)
    P_bar = F @ s.P @ F.T + s.Q
    P_bar = 0.5 * (P_bar + P_bar.T)
    return replace(s, z_hat=z_bar, P=P_bar)


def ekf_update(s: EkfState, y_k: Sequence[float]) -> EkfState:
    """Measurement update with the (I - K H) P covariance form.

    Raises:
    -------
    IllConditionedInnovation
        If cond(R + H P H^T) exceeds the configured limit
    """
    y = np.asarray(y_k, dtype=float)
    S = s.R + H @ s.P @ H.T
    condition = np.linalg.cond(S)
    if not condition <= s.max_condition:
        raise IllConditionedInnovation(f"innovation covariance condition {condition:.3g}")
    PHt = s.P @ H.T
    K = np.linalg.solve(S, PHt.T).T
    innovation = y - H @ s.z_hat
    z_hat = s.z_hat + K @ innovation
    P = (np.eye(STATE_DIM) - K @ H) @ s.P
    P = 0.5 * (P + P.T)
    return replace(s, z_hat=z_hat, P=P, innovation=innovation, innovation_cov=S)


def kalman_gain(s: EkfState) -> np.ndarray:
    """Gain K = P H^T (R + H P H^T)^-1 of the current covariance."""
    S = s.R + H @ s.P @ H.T
    return np.linalg.solve(S, (s.P @ H.T).T).T
