"""Tests for trace metrics."""

import math

import numpy as np
import pytest

from errors import NotConverged, is_not_converged
from scenarios import (
    COLUMNS,
    Trace,
    TraceRecord,
    decay_rate_from_peaks,
    evaluate_metrics,
    fit_decay_envelope,
    angle_settling_time,
    length_convergence_time,
    settling_time,
)
from scenarios.metrics import refined_extrema
from scenarios.trace import BOOL_COLUMNS

L_STAR, G, DT = 1.05, 9.81, 0.05
W0 = math.sqrt(G / L_STAR)


def trace_from_columns(duration: float, **columns) -> Trace:
    """A trace on the control grid; columns are arrays or callables of t."""
    t = np.arange(int(round(duration / DT)) + 1) * DT
    values = {name: np.zeros_like(t) for name in COLUMNS if name not in BOOL_COLUMNS}
    values.update({name: np.zeros(t.size, dtype=bool) for name in BOOL_COLUMNS})
    values["L_bar"] = np.full_like(t, L_STAR)
    for name, column in columns.items():
        values[name] = column(t) if callable(column) else np.broadcast_to(column, t.shape)
    values["t"] = t
    trace = Trace(scenario_id="synthetic", seed=0, L_true=L_STAR, g=G)
    for k in range(t.size):
        fields = {}
        for name in COLUMNS:
            v = values[name][k]
            fields[name] = bool(v) if name in BOOL_COLUMNS else float(v)
        trace.append(TraceRecord(**fields))
    return trace


class TestLengthConvergenceTime:
    """Test cases for length_convergence_time."""

    def test_constant_at_true_length(self):
        """Test L_bar = L* from the start gives 0."""
        t = np.arange(201) * DT
        assert length_convergence_time(t, np.full_like(t, L_STAR), L_STAR) == 0.0

    def test_exponential_approach(self):
        """Test the band entry time of an exponential approach from 0.5 m."""
        t = np.arange(601) * DT
        L_bar = L_STAR - (L_STAR - 0.5) * np.exp(-t / 2.0)
        expected = 2.0 * math.log((L_STAR - 0.5) / (0.05 * L_STAR))
        assert length_convergence_time(t, L_bar, L_STAR) == pytest.approx(expected, abs=DT)

    def test_oscillating_estimate(self):
        """Test an estimate swinging between 0.75 and 1.5 m never converges."""
        t = np.arange(601) * DT
        L_bar = 1.125 + 0.375 * np.sin(t)
        assert length_convergence_time(t, L_bar, L_STAR) is NotConverged

    def test_band_held_too_briefly(self):
        """Test entering the band shortly before the end is not enough."""
        t = np.arange(201) * DT
        L_bar = np.where(t < 8.0, 0.5, L_STAR)
        assert length_convergence_time(t, L_bar, L_STAR, min_hold=5.0) is NotConverged


class TestDecayRate:
    """Test cases for decay_rate_from_peaks and fit_decay_envelope."""

    def test_log_decrement_of_damped_sine(self):
        """Test exp(-0.6 t) sin(w0 t) gives sigma = 0.6."""
        t = np.arange(401) * DT
        sigma, times, _ = decay_rate_from_peaks(t, np.exp(-0.6 * t) * np.sin(W0 * t))
        assert sigma == pytest.approx(0.6, rel=0.02)
        np.testing.assert_allclose(np.diff(times), math.pi / math.sqrt(W0**2 - 0.36), rtol=0.01)

    def test_heavy_damping_keeps_enough_extrema(self):
        """Test a swing losing 80% per period still gives a rate from its half-period extrema."""
        t = np.arange(401) * DT
        w = W0 * math.sqrt(1.0 - 0.2**2)
        sigma = 0.2 * W0
        rate, times, values = decay_rate_from_peaks(t, 0.19 * np.exp(-sigma * t) * np.sin(w * t))
        assert values.size >= 3
        assert rate == pytest.approx(sigma, rel=0.03)

    def test_extrema_alternate_sign(self):
        """Test maxima and minima are merged in time order as magnitudes."""
        t = np.arange(201) * DT
        times, values = refined_extrema(t, np.cos(W0 * t))
        assert np.all(np.diff(times) > 0)
        np.testing.assert_allclose(values, 1.0, atol=1e-2)
        np.testing.assert_allclose(times[0], math.pi / W0, atol=5e-3)

    def test_too_few_peaks(self):
        """Test a signal with fewer than three usable peaks."""
        t = np.arange(41) * DT
        sigma, _, _ = decay_rate_from_peaks(t, np.sin(W0 * t))
        assert sigma is NotConverged

    def test_envelope_fit(self):
        """Test the fitted rate of an exponential with offset."""
        times = np.linspace(1.0, 15.0, 8)
        values = 2.0 * np.exp(-0.4 * (times - 1.0)) + 0.1
        assert fit_decay_envelope(times, values) == pytest.approx(0.4, rel=1e-4)

    def test_envelope_needs_three_points(self):
        """Test two peaks are not enough for the envelope fit."""
        assert fit_decay_envelope(np.array([0.0, 1.0]), np.array([1.0, 0.5])) is NotConverged


class TestSettlingTime:
    """Test cases for settling_time."""

    def test_exponential_error(self):
        """Test exp(-t) enters a 0.02 band at ln 50."""
        t = np.arange(201) * DT
        assert settling_time(t, np.exp(-t), 0.02) == pytest.approx(math.log(50.0), abs=DT)

    def test_already_settled(self):
        """Test an error inside the band from t_start on."""
        t = np.arange(201) * DT
        error = np.where(t < 2.0, 1.0, 0.0)
        assert settling_time(t, error, 0.02, t_start=2.0) == 0.0

    def test_never_settles(self):
        """Test an error still outside the band at the end."""
        t = np.arange(201) * DT
        assert settling_time(t, np.ones_like(t), 0.02) is NotConverged


class TestAngleSettlingTime:
    """Test cases for angle_settling_time."""

    def test_settles_from_damping_on(self):
        """Test a decay exp(-t) from t = 2 s enters a 5% band after ln 20."""
        t = np.arange(301) * DT
        cols = {"t": t, "phi_x": np.exp(-t), "phi_y": np.zeros_like(t), "damping_on": (t >= 2.0).astype(float)}
        assert angle_settling_time(cols) == pytest.approx(math.log(20.0), abs=DT)

    def test_faster_decay_settles_sooner(self):
        """Test a larger decay rate gives a shorter settling time."""
        t = np.arange(601) * DT
        times = []
        for sigma in (0.15, 0.3, 0.6):
            phi = 0.2 * np.exp(-sigma * t) * np.sin(W0 * t)
            cols = {"t": t, "phi_x": phi, "phi_y": 0.5 * phi, "damping_on": np.ones_like(t)}
            times.append(angle_settling_time(cols))
        assert times[0] > times[1] > times[2] > 0.0

    def test_no_damping(self):
        """Test runs without damping have no angle settling time."""
        t = np.arange(11) * DT
        cols = {"t": t, "phi_x": np.ones_like(t), "phi_y": np.zeros_like(t), "damping_on": np.zeros_like(t)}
        assert angle_settling_time(cols) is None


class TestEvaluateMetrics:
    """Test cases for evaluate_metrics."""

    def test_quiet_trace(self):
        """Test a still run without events or reference changes."""
        report = evaluate_metrics(trace_from_columns(10.0))
        assert report.scenario_id == "synthetic"
        assert report.convergence_time == 0.0
        assert report.final_length_error == 0.0
        assert report.max_length_error_window is None
        assert report.zeta_fit is None
        assert report.angle_settling_time is None
        assert report.settling_time is None
        assert report.overshoot is None
        assert report.angle_rms_error == 0.0
        assert not report.has_not_converged

    def test_damping_decay(self):
        """Test the damping ratio of a decaying swing after damping-on."""
        trace = trace_from_columns(
            20.0,
            phi_x=lambda t: np.exp(-0.6 * t) * np.sin(W0 * t),
            damping_on=True,
        )
        report = evaluate_metrics(trace)
        assert report.zeta_fit * W0 == pytest.approx(0.6, rel=0.02)

    def test_reference_step(self):
        """Test settling time, overshoot and final error of a tip step at t = 1 s."""
        trace = trace_from_columns(
            12.0,
            x_d=lambda t: np.where(t >= 1.0, 1.0, 0.0),
            x5=lambda t: np.where(t >= 1.0, 1.0 - np.exp(-(t - 1.0)), 0.0),
        )
        report = evaluate_metrics(trace)
        assert report.settling_time == pytest.approx(math.log(50.0), abs=DT)
        assert report.overshoot == 0.0
        assert report.steady_state_error == pytest.approx(math.exp(-11.0), rel=1e-6)

    def test_window_error_and_rms(self):
        """Test the windowed length error and the angle RMS."""
        trace = trace_from_columns(
            20.0,
            L_bar=lambda t: np.where(t < 15.0, 1.1, L_STAR),
            phi_hat_x=0.01,
        )
        report = evaluate_metrics(trace)
        assert report.max_length_error_window == pytest.approx(100.0 * 0.05 / L_STAR)
        assert report.angle_rms_error == pytest.approx(math.degrees(0.01 / math.sqrt(2.0)))

    def test_small_angle_failure(self):
        """Test an oscillating estimate is reported as NotConverged."""
        report = evaluate_metrics(trace_from_columns(30.0, L_bar=lambda t: 1.125 + 0.375 * np.sin(t)))
        assert is_not_converged(report.convergence_time)
        assert report.has_not_converged
        assert report.as_row()["convergence_time"] == "NotConverged"
        assert report.as_row()["zeta_fit"] == ""

    def test_empty_trace(self):
        """Test an empty trace is rejected."""
        with pytest.raises(ValueError):
            evaluate_metrics(Trace(scenario_id="empty", seed=0, L_true=L_STAR))
