"""Acceptance metrics computed from a finished trace."""

import logging
import math
from dataclasses import dataclass, fields
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from errors import NotConverged, is_not_converged
from scenarios.trace import Trace

logger = logging.getLogger(__name__)

Metric = Union[float, None, type(NotConverged)]


@dataclass(frozen=True)
class MetricsReport:
    """Metrics of one run.

    None marks a metric that does not apply to the run (no damping event,
    no reference change); NotConverged marks one whose threshold was
    never met.

    Attributes:
    -----------
    convergence_time : float or NotConverged
        First time after which L_bar stays within the band around L* [s]
    final_length_error : float
        |L_bar - L*| / L* at the end of the run [%]
    max_length_error_window : float or None
        Largest relative length error inside the error window [%]
    zeta_fit, zeta_envelope : float, None or NotConverged
        Damping ratio from log decrements and from an exponential envelope fit
    angle_settling_time : float, None or NotConverged
        Time from damping-on until the swing magnitude stays inside the
        band around zero [s]
    settling_time : float, None or NotConverged
        Time from the last reference change into the 2% band [s]
    steady_state_error : float
        Final distance between tip and reference [m]
    overshoot : float or None
        Travel past the reference along the step direction, relative to the step
    angle_rms_error : float
        RMS of the cable-angle estimation error over both axes [deg]
    """

    scenario_id: str
    seed: int
    convergence_time: Metric
    final_length_error: float
    max_length_error_window: Metric
    zeta_fit: Metric
    zeta_envelope: Metric
    angle_settling_time: Metric
    settling_time: Metric
    steady_state_error: float
    overshoot: Metric
    angle_rms_error: float

    @property
    def has_not_converged(self) -> bool:
        return any(is_not_converged(getattr(self, f.name)) for f in fields(self))

    def as_row(self) -> Dict[str, str]:
        """Metrics as strings, for report tables."""
        row = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                row[f.name] = ""
            elif is_not_converged(value) or isinstance(value, str):
                row[f.name] = str(value)
            else:
                row[f.name] = format(value, ".6g")
        return row


def length_convergence_time(
    t: np.ndarray,
    L_bar: np.ndarray,
    L_star: float,
    band: float = 0.05,
    min_hold: float = 5.0,
) -> Metric:
    """First time after which |L_bar - L*| / L* < band to the end of the trace.

    The band has to be held for at least ``min_hold`` seconds.
    """
    inside = np.abs(L_bar - L_star) / L_star < band
    if inside.size == 0 or not inside[-1]:
        return NotConverged
    outside = np.flatnonzero(~inside)
    start = outside[-1] + 1 if outside.size else 0
    if t[-1] - t[start] < min_hold:
        return NotConverged
    return float(t[start])


def refined_peaks(t: np.ndarray, signal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Times and values of the positive peaks, refined by a parabola through each peak and its neighbours."""
    idx, _ = find_peaks(signal)
    idx = idx[(idx > 0) & (idx < signal.size - 1)]
    times, values = [], []
    for i in idx:
        y0, y1, y2 = signal[i - 1], signal[i], signal[i + 1]
        curvature = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / curvature if curvature != 0.0 else 0.0
        times.append(t[i] + shift * (t[i + 1] - t[i]))
        values.append(y1 - 0.25 * (y0 - y2) * shift)
    return np.array(times), np.array(values)


def refined_extrema(t: np.ndarray, signal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Times and magnitudes of the |signal| extrema, maxima and minima merged in time order."""
    t_max, v_max = refined_peaks(t, signal)
    t_min, v_min = refined_peaks(t, -signal)
    times = np.concatenate([t_max, t_min])
    values = np.concatenate([v_max, v_min])
    order = np.argsort(times, kind="stable")
    return times[order], values[order]


def decay_rate_from_peaks(
    t: np.ndarray,
    signal: np.ndarray,
    min_fraction: float = 0.05,
    min_peaks: int = 3,
) -> Tuple[Metric, np.ndarray, np.ndarray]:
    """Exponential decay rate sigma from the log decrements of successive |signal| extrema.

    Extrema are half a period apart. Those below ``min_fraction`` of the
    first one are dropped; with fewer than ``min_peaks`` left the rate is
    NotConverged.

    Returns:
    --------
    tuple
        (sigma [1/s] or NotConverged, extremum times, extremum magnitudes)
    """
    times, values = refined_extrema(np.asarray(t, dtype=float), np.asarray(signal, dtype=float))
    if values.size:
        keep = values >= min_fraction * values[0]
        stop = np.argmin(keep) if not keep.all() else keep.size
        times, values = times[:stop], values[:stop]
    if values.size < min_peaks or np.any(values <= 0):
        return NotConverged, times, values
    rates = np.log(values[:-1] / values[1:]) / np.diff(times)
    for k, rate in enumerate(rates):
        logger.debug("Log decrement over half period %d: sigma = %.4f 1/s", k, rate)
    return float(np.mean(rates)), times, values


def fit_decay_envelope(times: np.ndarray, values: np.ndarray) -> Metric:
    """Fit a exp(-sigma (t - t0)) + b to a peak sequence; returns sigma."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return NotConverged
    t0 = times[0]

    def envelope(t, a, sigma, b):
        return a * np.exp(-sigma * (t - t0)) + b

    span = max(times[-1] - t0, 1e-9)
    guess = math.log(max(values[0], 1e-12) / max(values[-1], 1e-12)) / span
    try:
        params, _ = curve_fit(envelope, times, values, p0=(values[0], max(guess, 1e-3), 0.0), maxfev=5000)
    except (RuntimeError, ValueError) as exc:
        logger.debug("Envelope fit failed: %s", exc)
        return NotConverged
    return float(params[1])


def settling_time(
    t: np.ndarray,
    error: np.ndarray,
    threshold: float,
    t_start: float = 0.0,
) -> Metric:
    """Time after t_start from which error stays at or below threshold."""
    mask = t >= t_start - 1e-12
    t, error = t[mask], error[mask]
    if error.size == 0 or error[-1] > threshold:
        return NotConverged
    outside = np.flatnonzero(error > threshold)
    if outside.size == 0:
        return 0.0
    return float(t[outside[-1] + 1] - t_start)


def angle_rms_error(trace_cols: Dict[str, np.ndarray], t_from: float = 5.0) -> float:
    """RMS of phi_hat - phi over both axes for t >= t_from [deg]."""
    mask = trace_cols["t"] >= t_from
    if not np.any(mask):
        mask = np.ones_like(trace_cols["t"], dtype=bool)
    dx = trace_cols["phi_hat_x"][mask] - trace_cols["phi_x"][mask]
    dy = trace_cols["phi_hat_y"][mask] - trace_cols["phi_y"][mask]
    return float(np.degrees(np.sqrt(np.mean(np.concatenate([dx, dy]) ** 2))))


def _reference_step(cols: Dict[str, np.ndarray]) -> Optional[Tuple[int, np.ndarray, np.ndarray]]:
    ref = np.column_stack([cols["x_d"], cols["y_d"]])
    changes = np.flatnonzero(np.any(np.diff(ref, axis=0) != 0.0, axis=1))
    if changes.size == 0:
        return None
    k = changes[-1] + 1
    return k, ref[k], np.array([cols["x5"][k], cols["y5"][k]])


def _damping_window(cols: Dict[str, np.ndarray]) -> Optional[slice]:
    on = np.flatnonzero(cols["damping_on"] > 0.5)
    if on.size == 0:
        return None
    return slice(on[0], on[-1] + 1)


def angle_settling_time(cols: Dict[str, np.ndarray], band: float = 0.05) -> Metric:
    """Settling time of the swing magnitude after damping-on.

    The band is ``band`` times the largest magnitude inside the damping
    window. None when damping never switches on.
    """
    window = _damping_window(cols)
    if window is None:
        return None
    t = cols["t"][window]
    magnitude = np.hypot(cols["phi_x"][window], cols["phi_y"][window])
    return settling_time(t, magnitude, band * float(magnitude.max()), t_start=float(t[0]))


def _damping_zeta(cols: Dict[str, np.ndarray], omega0: float) -> Tuple[Metric, Metric]:
    window = _damping_window(cols)
    if window is None:
        return None, None
    t = cols["t"][window]
    amplitude = {axis: np.max(np.abs(cols[axis][window])) for axis in ("phi_x", "phi_y")}
    axis = max(amplitude, key=amplitude.get)
    signal = cols[axis][window]
    sigma, times, values = decay_rate_from_peaks(t, signal)
    if is_not_converged(sigma):
        return NotConverged, NotConverged
    sigma_env = fit_decay_envelope(times, values)
    zeta_env = sigma_env / omega0 if not is_not_converged(sigma_env) else NotConverged
    return sigma / omega0, zeta_env


def evaluate_metrics(
    trace: Trace,
    L_star: Optional[float] = None,
    band: float = 0.05,
    min_hold: float = 5.0,
    error_window: Tuple[float, float] = (12.0, 20.0),
    rms_from: float = 5.0,
    settle_band: float = 0.02,
    angle_band: float = 0.05,
) -> MetricsReport:
    """Compute the MetricsReport of a trace.

    Parameters:
    -----------
    trace : Trace
        A non-empty trace
    L_star : float, optional
        True cable length; defaults to the trace metadata
    band : float
        Relative band of the length convergence time
    min_hold : float
        Shortest time the band must be held [s]
    error_window : tuple
        (start, end) of the max_length_error_window metric [s]
    rms_from : float
        Start of the angle RMS window [s]
    settle_band : float
        Settling band as a fraction of the reference step
    angle_band : float
        Angle settling band as a fraction of the largest swing after damping-on

    Raises:
    -------
    ValueError
        If the trace is empty
    """
    if len(trace) == 0:
        raise ValueError("cannot evaluate an empty trace")
    cols = trace.columns()
    t = cols["t"]
    L_star = trace.L_true if L_star is None else L_star
    rel = np.abs(cols["L_bar"] - L_star) / L_star

    in_window = (t >= error_window[0]) & (t <= error_window[1])
    max_window = float(100.0 * rel[in_window].max()) if np.any(in_window) else None

    zeta_fit, zeta_env = _damping_zeta(cols, math.sqrt(trace.g / L_star))

    tip = np.column_stack([cols["x5"], cols["y5"]])
    ref = np.column_stack([cols["x_d"], cols["y_d"]])
    error = np.linalg.norm(tip - ref, axis=1)
    settle, overshoot = None, None
    step = _reference_step(cols)
    if step is not None:
        k, target, start = step
        size = float(np.linalg.norm(target - start))
        if size > 0.0:
            settle = settling_time(t, error, settle_band * size, t_start=t[k])
            direction = (target - start) / size
            progress = (tip[k:] - start) @ direction
            overshoot = max(0.0, float(progress.max()) / size - 1.0)

    return MetricsReport(
        scenario_id=trace.scenario_id,
        seed=trace.seed,
        convergence_time=length_convergence_time(t, cols["L_bar"], L_star, band, min_hold),
        final_length_error=float(100.0 * rel[-1]),
        max_length_error_window=max_window,
        zeta_fit=zeta_fit,
        zeta_envelope=zeta_env,
        angle_settling_time=angle_settling_time(cols, angle_band),
        settling_time=settle,
        steady_state_error=float(error[-1]),
        overshoot=overshoot,
        angle_rms_error=angle_rms_error(cols, rms_from),
    )
