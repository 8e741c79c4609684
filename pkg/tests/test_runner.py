"""Tests for the closed-loop scenario runner."""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from errors import ConeSingularity, NotConverged, OutOfReach, ScenarioConfigError, SimulationAborted
from scenarios import (
    apply_overrides,
    evaluate_metrics,
    initial_state,
    load_grid,
    load_scenario,
    run_scenario,
    scenario_from_mapping,
    sweep,
)
from tests.conftest import START_TIP

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenario_files"
L_STAR = 1.05


def short_config(duration: float = 1.0, **sections):
    """A scenario of a few ticks; sections are {key: raw value} dicts."""
    mapping = {"scenario": {"id": "unit", "duration": str(duration)}}
    for name, entries in sections.items():
        mapping.setdefault(name, {}).update(entries)
    return scenario_from_mapping(mapping).validate()


class TestInitialState:
    """Test cases for initial_state."""

    def test_from_tip(self, start_joints):
        """Test the crane starts at rest at the configured tip."""
        sim = initial_state(short_config(initial={"phi_x_deg": "15"}))
        np.testing.assert_allclose(sim.joints.q, start_joints.q)
        np.testing.assert_array_equal(sim.joints.qdot, np.zeros(3))
        assert sim.pendulum.phi_x == pytest.approx(math.radians(15.0))
        assert sim.t == 0.0

    def test_explicit_joints(self):
        """Test explicit joint coordinates win over the tip."""
        sim = initial_state(short_config(initial={"q": "0.2, 0.5, 0.6"}))
        np.testing.assert_array_equal(sim.joints.q, [0.2, 0.5, 0.6])


class TestRunScenario:
    """Test cases for run_scenario."""

    def test_one_record_per_control_tick(self):
        """Test t = k dt for k = 0 .. duration / dt."""
        trace = run_scenario(short_config(1.0))
        assert len(trace) == 21
        np.testing.assert_array_equal(trace.column("t"), [k * 0.05 for k in range(21)])

    def test_deterministic_csv(self, tmp_path):
        """Test the same config and seed write byte-identical traces."""
        cfg = short_config(1.0, initial={"phi_x_deg": "10"})
        run_scenario(cfg, tmp_path / "a")
        run_scenario(cfg, tmp_path / "b")
        first = (tmp_path / "a" / "unit_seed0.csv").read_bytes()
        assert first == (tmp_path / "b" / "unit_seed0.csv").read_bytes()
        assert first.startswith(b"# schema=1 scenario=unit seed=0")

    def test_seed_changes_noise(self):
        """Test another seed draws other pixel noise."""
        a = run_scenario(short_config(0.5, scenario={"seed": "1"}))
        b = run_scenario(short_config(0.5, scenario={"seed": "2"}))
        assert not np.array_equal(a.column("y1"), b.column("y1"))

    def test_zero_scenario(self):
        """Test a still cable seen without noise leaves everything at rest but the gains."""
        trace = run_scenario(short_config(2.0, rig={"pixel_noise_sigma": "0"}))
        assert np.all(trace.column("measurement_valid") == 1.0)
        np.testing.assert_array_equal(trace.column("phi_x"), 0.0)
        np.testing.assert_array_equal(trace.column("phi_y"), 0.0)
        np.testing.assert_array_equal(trace.column("x5"), trace.column("x5")[0])
        np.testing.assert_array_equal(trace.column("v_x"), 0.0)
        for name in ("phi_hat_x", "phi_hat_y", "y1", "y2", "n_hat_x", "n_hat_y"):
            assert np.max(np.abs(trace.column(name))) < 1e-6
        np.testing.assert_allclose(trace.column("L_bar"), 0.5, atol=1e-6)
        assert np.all(np.diff(trace.column("gamma")) > 0.0)
        np.testing.assert_allclose(trace.column("x5")[0], START_TIP[0], atol=1e-9)

    def test_lost_measurements_keep_running(self):
        """Test a run without any valid frame logs NaN measurements and predicts only."""
        trace = run_scenario(short_config(1.0, rig={"resolution": "1280, 200"}))
        assert not np.any(trace.column("measurement_valid"))
        assert np.all(np.isnan(trace.column("y1")))
        np.testing.assert_array_equal(trace.column("phi_hat_x"), 0.0)

    def test_event_flags(self):
        """Test damping and the estimate freeze switch on at their event time."""
        trace = run_scenario(short_config(1.0, initial={"phi_x_deg": "5"}, events={"damping_on": "0.5"}))
        t = trace.column("t")
        np.testing.assert_array_equal(trace.column("damping_on"), (t >= 0.5 - 1e-9).astype(float))
        np.testing.assert_array_equal(trace.column("estimator_frozen"), (t >= 0.5 - 1e-9).astype(float))
        eta = trace.column("eta")[t >= 0.5 - 1e-9]
        np.testing.assert_array_equal(eta, eta[0])

    def test_tip_moves_towards_reference(self):
        """Test a reference step starts the tip moving the right way."""
        target_x = START_TIP[0] - 0.1
        trace = run_scenario(
            short_config(1.5, reference={"waypoints": f"0.5: {target_x}, {START_TIP[1]}"})
        )
        x_d = trace.column("x_d")
        t = trace.column("t")
        np.testing.assert_allclose(x_d[t < 0.5 - 1e-9], START_TIP[0], atol=1e-9)
        np.testing.assert_array_equal(x_d[t >= 0.5 - 1e-9], target_x)
        assert trace.column("x5")[-1] < trace.column("x5")[0] - 1e-3

    def test_uneven_rates_rejected(self):
        """Test a control period that is not a multiple of the physics step."""
        with pytest.raises(ScenarioConfigError):
            run_scenario(short_config(1.0, scenario={"physics_dt": "0.003"}))

    def test_invalid_config_rejected(self):
        """Test an event after the end of the run."""
        cfg = scenario_from_mapping({"scenario": {"duration": "1"}, "events": {"damping_on": "2"}})
        with pytest.raises(ScenarioConfigError):
            run_scenario(cfg)


class TestAbort:
    """Runs that stop early."""

    def test_cone_singularity_flushes_partial_trace(self, tmp_path):
        """Test a cable at the phi_y guard aborts after the first tick."""
        cfg = short_config(1.0, initial={"phi_y_deg": "89.99"})
        with pytest.raises(SimulationAborted) as excinfo:
            run_scenario(cfg, tmp_path)
        err = excinfo.value
        assert isinstance(err.cause, ConeSingularity)
        assert len(err.trace) == 1
        lines = Path(err.csv_path).read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3

    def test_unreachable_start(self, tmp_path):
        """Test a start tip outside the workspace aborts with an empty trace."""
        cfg = short_config(1.0, initial={"tip": "10, 0, -1.161"})
        with pytest.raises(SimulationAborted) as excinfo:
            run_scenario(cfg, tmp_path)
        assert isinstance(excinfo.value.cause, OutOfReach)
        assert len(excinfo.value.trace) == 0
        assert (tmp_path / "unit_seed0.csv").read_text(encoding="utf-8").count("\n") == 2


@pytest.mark.slow
class TestAcceptance:
    """Full-length runs of the shipped scenarios."""

    def test_free_swing_length_estimate(self):
        """Test a free 15 degree swing brings L_bar within 5% of L* by 10 s, in under 5 s of wall time."""
        cfg = load_scenario(SCENARIO_DIR / "free_oscillation.ini")
        started = time.perf_counter()
        trace = run_scenario(cfg)
        elapsed = time.perf_counter() - started
        t, L_bar, eta = trace.column("t"), trace.column("L_bar"), trace.column("eta")
        report = evaluate_metrics(trace)
        assert report.convergence_time <= 10.0
        assert np.all(np.abs(L_bar[t >= 10.0] - L_STAR) / L_STAR < 0.05)
        assert report.max_length_error_window <= 6.0
        assert np.all((eta >= 1 / 1.5 - 1e-12) & (eta <= 1 / 0.3 + 1e-12))
        assert elapsed < 5.0

    def test_small_angle_does_not_converge(self):
        """Test a 0.2 degree swing leaves the length estimate unconverged."""
        report = evaluate_metrics(run_scenario(load_scenario(SCENARIO_DIR / "small_angle.ini")))
        assert report.convergence_time is NotConverged
        assert report.has_not_converged

    def test_angle_and_guess_grid(self):
        """Test every amplitude and initial guess of the grid is within 5% of L* after 12 s."""
        template = load_scenario(SCENARIO_DIR / "free_oscillation.ini")
        cells = sweep(template, load_grid(SCENARIO_DIR / "angle_grid.ini"))
        assert len(cells) == 12
        for cell in cells:
            assert cell.ok, cell.error
            assert cell.report.max_length_error_window < 5.0, cell.overrides
            assert cell.report.final_length_error < 5.0, cell.overrides

    def test_damping_maneuver(self):
        """Test the tip maneuver settles and the swing decays with about the commanded damping."""
        report = evaluate_metrics(run_scenario(load_scenario(SCENARIO_DIR / "damping.ini")))
        assert report.steady_state_error < 5e-3
        assert report.overshoot <= 0.10
        assert report.zeta_fit == pytest.approx(0.2, rel=0.25)
        assert report.angle_settling_time > 0.0

    @pytest.mark.parametrize("zeta", [0.05, 0.1, 0.2])
    def test_fitted_damping_ratio(self, zeta):
        """Test the fitted damping ratio follows the commanded one."""
        cfg = apply_overrides(load_scenario(SCENARIO_DIR / "damping.ini"), {"controller.zeta": str(zeta)})
        report = evaluate_metrics(run_scenario(cfg))
        assert report.zeta_fit == pytest.approx(zeta, rel=0.25)

    def test_more_damping_settles_sooner(self):
        """Test the angle settling time shrinks as zeta grows over the zeta grid."""
        template = load_scenario(SCENARIO_DIR / "damping.ini")
        cells = sweep(template, load_grid(SCENARIO_DIR / "zeta_grid.ini"))
        assert [c.overrides["controller.zeta"] for c in cells] == ["0.05", "0.1", "0.2"]
        settling = [c.report.angle_settling_time for c in cells]
        assert settling[0] > settling[1] > settling[2]
