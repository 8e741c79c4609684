"""Online cable-length identification by least squares with projection.

The linearized swing about phi_x gives the parametric model z = eta* psi
with eta* = 1/L, where z = s/(s + lambda0) phidot_x and
psi = (-g phi_x + vdot_y)/(s + lambda0). Both filters are realized with the
first-order low-pass 1/(s + lambda0), so no signal is differentiated. The
estimate is kept inside [1/L_max, 1/L_min] by a gradient projection on the
convex constraint g(eta) <= 0.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class LengthEstimatorState:
    """Estimator memory and tuning.

    Attributes:
    -----------
    eta : float
        Estimate of 1/L [1/m]
    gamma : float
        Adaptive gain
    xf_z, xf_psi : float
        Low-pass filter states of the z and psi channels
    lambda0 : float
        Filter pole [1/s]
    beta : float
        Forgetting factor [1/s]
    L_min, L_max : float
        Admissible cable lengths [m]
    L_bar : float
        Low-pass filtered length estimate [m]
    tau_Lbar : float
        Time constant of the L_bar filter [s]
    u_z_prev, u_psi_prev : float or None
        Filter inputs of the previous step
    """

    eta: float
    gamma: float = 100.0
    xf_z: float = 0.0
    xf_psi: float = 0.0
    lambda0: float = 1.0
    beta: float = 0.5
    L_min: float = 0.3
    L_max: float = 1.5
    L_bar: float = 0.0
    tau_Lbar: float = 2.0
    u_z_prev: Optional[float] = None
    u_psi_prev: Optional[float] = None

    def __post_init__(self):
        if not self.L_max > self.L_min > 0:
            raise ValueError("bounds must satisfy L_max > L_min > 0")
        if self.gamma <= 0 or self.lambda0 <= 0 or self.beta < 0 or self.tau_Lbar <= 0:
            raise ValueError("gamma, lambda0 and tau_Lbar must be positive, beta non-negative")

    @classmethod
    def from_guess(
        cls,
        L0: float,
        gamma0: float = 100.0,
        beta: float = 0.5,
        L_min: float = 0.3,
        L_max: float = 1.5,
        lambda0: float = 1.0,
        tau_Lbar: float = 2.0,
    ) -> "LengthEstimatorState":
        """Start from an initial length guess L0 inside the bounds."""
        if not L_min <= L0 <= L_max:
            raise ValueError(f"initial guess {L0} m outside [{L_min}, {L_max}] m")
        return cls(
            eta=1.0 / L0,
            gamma=gamma0,
            lambda0=lambda0,
            beta=beta,
            L_min=L_min,
            L_max=L_max,
            L_bar=L0,
            tau_Lbar=tau_Lbar,
        )

    @property
    def L_hat(self) -> float:
        return 1.0 / self.eta

    @property
    def eta_bounds(self) -> Tuple[float, float]:
        return 1.0 / self.L_max, 1.0 / self.L_min


def filter_signals(
    phi_x: float,
    phidot_x: float,
    vdot_y: float,
    st: LengthEstimatorState,
    dt: float,
    g: float = 9.81,
) -> Tuple[float, float, LengthEstimatorState]:
    """Advance both filters one step and return (z, psi, new state).

    The low-pass 1/(s + lambda0) is discretized exactly for inputs that
    vary linearly between samples; z uses s/(s + lambda0) = 1 - lambda0/(s + lambda0).
    On the first call the previous input is taken equal to the current one.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    u_z = phidot_x
    u_psi = -g * phi_x + vdot_y
    prev_z = u_z if st.u_z_prev is None else st.u_z_prev
    prev_psi = u_psi if st.u_psi_prev is None else st.u_psi_prev

    a, b_prev, b_now = hold_coefficients(st.lambda0, dt)
    xf_z = a * st.xf_z + b_prev * prev_z + b_now * u_z
    xf_psi = a * st.xf_psi + b_prev * prev_psi + b_now * u_psi
    z = u_z - st.lambda0 * xf_z
    return z, xf_psi, replace(st, xf_z=xf_z, xf_psi=xf_psi, u_z_prev=u_z, u_psi_prev=u_psi)


def hold_coefficients(lam: float, dt: float) -> Tuple[float, float, float]:
    """Exact step of dx/dt = -lam x + u with u linear between two samples.

    Returns (a, b_prev, b_now) with x_k = a x_{k-1} + b_prev u_{k-1} + b_now u_k.
    """
    a = math.exp(-lam * dt)
    b = -math.expm1(-lam * dt) / lam
    b_now = b - (1.0 - a - lam * dt * a) / (lam * lam * dt)
    return a, b - b_now, b_now


def constraint_g(eta: float, L_min: float, L_max: float) -> Tuple[float, float]:
    """Convex constraint g(eta) <= 0 describing [1/L_max, 1/L_min], and its gradient."""
    if not L_max > L_min > 0:
        raise ValueError("bounds must satisfy L_max > L_min > 0")
    prod = L_max * L_min
    s = (L_max + L_min) / prod
    return eta * eta - eta * s + 1.0 / prod, 2.0 * eta - s


def estimator_step(
    st: LengthEstimatorState, z: float, psi: float, dt: float
) -> LengthEstimatorState:
    """One forward-Euler step of the projected least-squares law.

    eta follows gamma eps psi and gamma follows beta gamma - gamma^2 psi^2 / m_s^2
    inside the admissible set, or on its boundary when the update points
    inwards; both stand still otherwise. L_bar tracks 1/eta through a
    first-order filter.
    """
    ms2 = 1.0 + st.gamma * psi * psi
    eps = (z - st.eta * psi) / ms2
    eta_dot = st.gamma * eps * psi
    gamma_dot = st.beta * st.gamma - st.gamma * st.gamma * psi * psi / ms2

    g_val, grad = constraint_g(st.eta, st.L_min, st.L_max)
    interior = g_val < -BOUNDARY_TOL
    on_boundary = abs(g_val) <= BOUNDARY_TOL
    if not (interior or (on_boundary and eta_dot * grad <= 0.0)):
        eta_dot = 0.0
        gamma_dot = 0.0

    eta_lo, eta_hi = st.eta_bounds
    eta = st.eta + eta_dot * dt
    if eta < eta_lo or eta > eta_hi:
        logger.debug("eta %.6f clamped to [%.6f, %.6f]", eta, eta_lo, eta_hi)
        eta = min(eta_hi, max(eta_lo, eta))
    gamma = st.gamma + gamma_dot * dt

    k = 1.0 - math.exp(-dt / st.tau_Lbar)
    L_bar = st.L_bar + (1.0 / eta - st.L_bar) * k
    return replace(st, eta=eta, gamma=gamma, L_bar=L_bar)
