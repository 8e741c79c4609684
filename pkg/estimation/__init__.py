"""State and parameter estimation: the swing EKF and the cable-length estimator."""

from .ekf import (
    H,
    EkfConfig,
    EkfState,
    ekf_predict,
    ekf_update,
    kalman_gain,
    process_jacobian,
    process_model,
)
from .cable_length import (
    LengthEstimatorState,
    constraint_g,
    estimator_step,
    filter_signals,
    hold_coefficients,
)

__all__ = [
    "H",
    "EkfConfig",
    "EkfState",
    "LengthEstimatorState",
    "constraint_g",
    "ekf_predict",
    "ekf_update",
    "estimator_step",
    "filter_signals",
    "hold_coefficients",
    "kalman_gain",
    "process_jacobian",
    "process_model",
]
