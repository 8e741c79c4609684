"""Tests for the synthetic camera rig and triangulation."""

import dataclasses
import math

import numpy as np
import pytest

from errors import BehindCamera, CoincidentMarkers, DegenerateGeometry, InsufficientViews
from pendulum import PendulumState, SimState, cable_direction
from vision import (
    CameraModel,
    CameraRig,
    PixelObservation,
    marker_world_positions,
    measure_angles,
    measure_from_observations,
    project_marker,
    stack_constraints,
    synthesize_observations,
    triangulate_point,
)

K = np.array([[1800.0, 0.0, 640.0], [0.0, 1800.0, 360.0], [0.0, 0.0, 1.0]])


@pytest.fixture
def exact_rig():
    return CameraRig(pixel_noise_sigma=0.0)


def sim_at(joints, phi_x_deg: float = 0.0, phi_y_deg: float = 0.0) -> SimState:
    pendulum = PendulumState(phi_x=math.radians(phi_x_deg), phi_y=math.radians(phi_y_deg))
    return SimState(joints=joints, pendulum=pendulum)


def with_valid(obs: PixelObservation, cameras) -> PixelObservation:
    """Same pixels with only the listed cameras marked valid."""
    valid = np.zeros_like(obs.valid)
    valid[list(cameras)] = True
    return PixelObservation(pixels=obs.pixels, valid=valid & obs.valid, cameras=obs.cameras)


class TestCameraModel:
    """Test cases for CameraModel."""

    def test_rejects_lower_triangle(self):
        """Test that K with a non-zero lower triangle is rejected."""
        bad = K.copy()
        bad[1, 0] = 1.0
        with pytest.raises(ValueError):
            CameraModel(K=bad, R_c0=np.eye(3))

    def test_rejects_non_rotation(self):
        """Test that a reflection is not accepted as R_c0."""
        with pytest.raises(ValueError):
            CameraModel(K=K, R_c0=np.diag([1.0, 1.0, -1.0]))

    def test_projection_matrix(self):
        """Test P = K [R | t]."""
        t = np.array([-0.24, 0.0, 0.0])
        cam = CameraModel(K=K, R_c0=np.eye(3), t=t)
        np.testing.assert_allclose(cam.P, K @ np.hstack([np.eye(3), t[:, None]]))


class TestCameraRig:
    """Test cases for CameraRig."""

    def test_rejects_unordered_markers(self):
        """Test that the far marker must lie beyond the near one."""
        with pytest.raises(ValueError):
            CameraRig(marker_offsets=(0.6, 0.3))

    def test_translations_along_image_x(self):
        """Test cameras 2 and 3 are shifted by the spacings."""
        rig = CameraRig(delta12=0.2, delta23=0.3)
        t1, t2, t3 = rig.translations
        np.testing.assert_array_equal(t1, np.zeros(3))
        np.testing.assert_allclose(t2, [-0.2, 0.0, 0.0])
        np.testing.assert_allclose(t3, [-0.5, 0.0, 0.0])

    def test_cameras_follow_slew(self, rig):
        """Test the optical axis points radially outward for any slew angle."""
        for q1 in np.linspace(-math.pi, math.pi, 9):
            cameras, _ = rig.posed(q1)
            axis = cameras[0].R_c0[2]
            np.testing.assert_allclose(axis, [math.sin(q1), math.cos(q1), 0.0], atol=1e-12)


class TestMarkerWorldPositions:
    """Test cases for marker_world_positions."""

    def test_plumb_cable(self, start_joints, rig, geom):
        """Test the marker offset points straight down for a hanging cable."""
        X1, X2 = marker_world_positions(sim_at(start_joints), rig, geom)
        np.testing.assert_allclose(X2 - X1, [0.0, 0.0, 0.3], atol=1e-12)

    def test_offset_follows_cable_direction(self, start_joints, rig, geom, rng):
        """Test the marker separation is the cable direction times Delta2 - Delta1."""
        for phi_x, phi_y in rng.uniform(-40.0, 40.0, size=(50, 2)):
            X1, X2 = marker_world_positions(sim_at(start_joints, phi_x, phi_y), rig, geom)
            direction = cable_direction(math.radians(phi_x), math.radians(phi_y))
            np.testing.assert_allclose((X2 - X1) / 0.3, direction, atol=1e-12)


class TestProjectMarker:
    """Test cases for project_marker."""

    def test_optical_axis_hits_principal_point(self):
        """Test a point on the optical axis lands on the principal point."""
        cam = CameraModel(K=K, R_c0=np.eye(3))
        for depth in (0.5, 1.5, 10.0):
            uv, inside = project_marker(np.array([0.0, 0.0, depth]), cam)
            np.testing.assert_allclose(uv, [640.0, 360.0])
            assert inside

    def test_doubling_depth_halves_offset(self):
        """Test perspective division on an off-axis point."""
        cam = CameraModel(K=K, R_c0=np.eye(3))
        near, _ = project_marker(np.array([0.1, 0.05, 1.0]), cam)
        far, _ = project_marker(np.array([0.2, 0.1, 4.0]), cam)
        np.testing.assert_allclose(far - [640.0, 360.0], (near - [640.0, 360.0]) / 2.0)

    def test_out_of_frame_flag(self):
        """Test a point far off axis reports it leaves the image."""
        cam = CameraModel(K=K, R_c0=np.eye(3))
        _, inside = project_marker(np.array([2.0, 0.0, 1.0]), cam)
        assert not inside

    def test_behind_camera(self):
        """Test a point with negative depth raises BehindCamera."""
        cam = CameraModel(K=K, R_c0=np.eye(3))
        with pytest.raises(BehindCamera):
            project_marker(np.array([0.0, 0.0, -1.0]), cam)


class TestSynthesizeObservations:
    """Test cases for synthesize_observations."""

    def test_noise_free_matches_projection(self, start_joints, exact_rig, geom):
        """Test zero noise passes the exact projections through."""
        sim = sim_at(start_joints, 5.0, -3.0)
        obs = synthesize_observations(sim, exact_rig, geom, rng=1)
        markers = marker_world_positions(sim, exact_rig, geom)
        assert obs.n_valid == 3
        for i, cam in enumerate(obs.cameras):
            for j, X in enumerate(markers):
                np.testing.assert_allclose(obs.pixels[i, j], project_marker(X, cam)[0])

    def test_far_marker_is_lower_in_image(self, start_joints, rig, geom):
        """Test the marker ordering puts the larger v second."""
        obs = synthesize_observations(sim_at(start_joints, 10.0, 5.0), rig, geom, rng=3)
        for i in np.flatnonzero(obs.valid):
            assert obs.pixels[i, 1, 1] > obs.pixels[i, 0, 1]

    def test_same_seed_same_pixels(self, start_joints, rig, geom):
        """Test reproducibility for an identical seed."""
        sim = sim_at(start_joints, 8.0, 2.0)
        a = synthesize_observations(sim, rig, geom, rng=42)
        b = synthesize_observations(sim, rig, geom, rng=42)
        np.testing.assert_array_equal(a.pixels, b.pixels)
        np.testing.assert_array_equal(a.valid, b.valid)

    def test_noise_standard_deviation(self, start_joints, rig, geom):
        """Test the empirical pixel noise is within 5% of sigma."""
        sim = sim_at(start_joints, 5.0, 0.0)
        exact = synthesize_observations(sim, dataclasses.replace(rig, pixel_noise_sigma=0.0), geom)
        gen = np.random.default_rng(11)
        residuals = np.stack(
            [synthesize_observations(sim, rig, geom, rng=gen).pixels - exact.pixels for _ in range(1000)]
        )
        assert np.std(residuals) == pytest.approx(0.5, rel=0.05)
        assert abs(np.mean(residuals)) < 0.02

    def test_quantized_pixels_are_integers(self, start_joints, geom):
        """Test rounding to whole pixels."""
        rig = CameraRig(quantize=True)
        obs = synthesize_observations(sim_at(start_joints, 4.0, 4.0), rig, geom, rng=5)
        valid = obs.pixels[obs.valid]
        np.testing.assert_array_equal(valid, np.round(valid))

    def test_camera_losing_marker_is_invalid(self, start_joints, geom):
        """Test a camera whose image misses a marker is flagged invalid."""
        rig = CameraRig(pixel_noise_sigma=0.0, resolution=(1280, 200))
        obs = synthesize_observations(sim_at(start_joints), rig, geom)
        assert obs.n_valid == 0
        with pytest.raises(InsufficientViews):
            measure_from_observations(obs)


class TestTriangulatePoint:
    """Test cases for triangulate_point."""

    def test_exact_pixels_recover_marker(self, start_joints, exact_rig, geom):
        """Test noise-free pixels reproduce X with a vanishing sigma_4."""
        sim = sim_at(start_joints, 12.0, -7.0)
        obs = synthesize_observations(sim, exact_rig, geom)
        for j, X in enumerate(marker_world_positions(sim, exact_rig, geom)):
            X_bar, sigma4 = triangulate_point(obs, j)
            np.testing.assert_allclose(X_bar, X, atol=1e-9)
            assert sigma4 < 1e-9

    def test_noisy_pixels_give_positive_sigma4(self, start_joints, rig, geom):
        """Test sigma_4 is strictly positive under pixel noise."""
        obs = synthesize_observations(sim_at(start_joints, 3.0, 1.0), rig, geom, rng=9)
        assert triangulate_point(obs, 0)[1] > 0.0
        assert triangulate_point(obs, 1)[1] > 0.0

    def test_two_camera_subset(self, start_joints, rig, geom):
        """Test cameras 1 and 2 alone still locate the marker within noise bounds."""
        sim = sim_at(start_joints, 6.0, 2.0)
        X_true = marker_world_positions(sim, rig, geom)[1]
        obs = with_valid(synthesize_observations(sim, rig, geom, rng=21), [0, 1])
        X_bar, _ = triangulate_point(obs, 1)
        assert np.linalg.norm(X_bar - X_true) < 0.02

    def test_residual_equals_sigma4(self, start_joints, rig, geom):
        """Test the homogeneous solution leaves a residual of exactly sigma_4."""
        obs = synthesize_observations(sim_at(start_joints, 9.0, 4.0), rig, geom, rng=17)
        X_bar, sigma4 = triangulate_point(obs, 0)
        idx = np.flatnonzero(obs.valid)
        A = stack_constraints(obs.pixels[idx, 0], [obs.cameras[i] for i in idx])
        nu = np.append(X_bar, 1.0)
        nu /= np.linalg.norm(nu)
        assert np.linalg.norm(A @ nu) == pytest.approx(sigma4, rel=1e-6)

    def test_insufficient_views(self, start_joints, rig, geom):
        """Test a single valid camera cannot triangulate."""
        obs = with_valid(synthesize_observations(sim_at(start_joints), rig, geom, rng=2), [1])
        with pytest.raises(InsufficientViews):
            triangulate_point(obs, 0)

    def test_identical_cameras_are_degenerate(self):
        """Test two coincident cameras leave an ambiguous nullspace."""
        cam = CameraModel(K=K, R_c0=np.eye(3))
        uv, _ = project_marker(np.array([0.1, 0.05, 1.5]), cam)
        pixels = np.tile(uv, (2, 2, 1))
        obs = PixelObservation(pixels=pixels, valid=np.array([True, True]), cameras=(cam, cam))
        with pytest.raises(DegenerateGeometry):
            triangulate_point(obs, 0)


class TestMeasureAngles:
    """Test cases for measure_angles and the full measurement pipeline."""

    def test_plumb_cable(self):
        """Test a vertical cable reads zero angles."""
        np.testing.assert_array_equal(measure_angles(np.zeros(3), np.array([0.0, 0.0, 1.0])), [0.0, 0.0])

    def test_inverts_cable_direction(self):
        """Test exact markers at (10, 5) degrees read back (10, 5) degrees."""
        phi = np.radians([10.0, 5.0])
        X1 = np.array([0.2, -0.1, 0.4])
        X2 = X1 + 0.3 * cable_direction(*phi)
        np.testing.assert_allclose(measure_angles(X1, X2), phi, atol=1e-12)

    @pytest.mark.parametrize(
        "direction,expected",
        [((0.0, -1.0, 0.0), (90.0, 0.0)), ((0.0, 1.0, 0.0), (-90.0, 0.0)), ((1.0, 0.0, 0.0), (0.0, 90.0))],
    )
    def test_horizontal_cable(self, direction, expected):
        """Test a cable lying in the horizontal plane reads quarter turns instead of dividing by zero."""
        np.testing.assert_allclose(measure_angles(np.zeros(3), np.array(direction)), np.radians(expected), atol=1e-12)

    def test_coincident_markers(self):
        """Test markers closer than a nanometre raise."""
        with pytest.raises(CoincidentMarkers):
            measure_angles(np.ones(3), np.ones(3) + 1e-10)

    @pytest.mark.parametrize("phi_x", [-30.0, -15.0, 0.0, 15.0, 30.0])
    @pytest.mark.parametrize("phi_y", [-30.0, -15.0, 0.0, 15.0, 30.0])
    def test_noise_free_round_trip(self, start_joints, exact_rig, geom, phi_x, phi_y):
        """Test the whole pipeline returns the true angles without noise."""
        obs = synthesize_observations(sim_at(start_joints, phi_x, phi_y), exact_rig, geom)
        meas = measure_from_observations(obs)
        np.testing.assert_allclose(meas.y, np.radians([phi_x, phi_y]), atol=1e-9)
        assert np.all(meas.sigma4 < 1e-9)
        assert meas.n_views >= 2

    def test_noisy_angle_rms(self, start_joints, rig, geom):
        """Test the angle RMS error stays below half a degree at 0.5 px noise."""
        sim = sim_at(start_joints, 8.0, -4.0)
        gen = np.random.default_rng(5)
        errors = np.array(
            [measure_from_observations(synthesize_observations(sim, rig, geom, rng=gen)).y for _ in range(1000)]
        ) - np.radians([8.0, -4.0])
        rms = np.degrees(np.sqrt(np.mean(errors**2, axis=0)))
        assert np.all(rms < 0.5)

    def test_three_cameras_beat_pairs(self, start_joints, rig, geom):
        """Test adding the third camera never increases the angle error variance."""
        sim = sim_at(start_joints, 6.0, 3.0)
        truth = np.radians([6.0, 3.0])
        gen = np.random.default_rng(8)
        subsets = {"all": [0, 1, 2], "12": [0, 1], "13": [0, 2], "23": [1, 2]}
        sq_err = {name: [] for name in subsets}
        for _ in range(1000):
            obs = synthesize_observations(sim, rig, geom, rng=gen)
            for name, cams in subsets.items():
                y = measure_from_observations(with_valid(obs, cams)).y
                sq_err[name].append(np.sum((y - truth) ** 2))
        mse = {name: np.mean(v) for name, v in sq_err.items()}
        assert mse["all"] < mse["12"]
        assert mse["all"] < mse["23"]
        assert mse["all"] <= 1.05 * mse["13"]
