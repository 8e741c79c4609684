"""Pinhole camera rig mounted on the crane king, and synthetic marker pixels."""

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from errors import BehindCamera
from kinematics import CraneGeometry, forward_kinematics, slew_rotation
from kinematics.crane import rot_x, rot_y
from pendulum import SimState, cable_direction

logger = logging.getLogger(__name__)

# Camera axes relative to frame 1: optical axis radially outward, image
# x along -y1, image y along -z1 (down in the inertial frame).
_CAMERA_IN_FRAME1 = rot_x(math.pi / 2).T @ rot_y(math.pi / 2)

NUM_CAMERAS = 3
NUM_MARKERS = 2

SeedLike = Union[int, np.random.Generator, None]


@dataclass(frozen=True)
class CameraModel:
    """A posed pinhole camera.

    Attributes:
    -----------
    K : ndarray
        3x3 upper-triangular intrinsics [px]
    R_c0 : ndarray
        Rotation from inertial axes to camera axes
    t : ndarray
        Translation from camera 1 to this camera, in camera axes [m]
    resolution : tuple
        (width, height) [px]
    """

    K: np.ndarray
    R_c0: np.ndarray
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))
    resolution: Tuple[int, int] = (1280, 720)

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        if K.shape != (3, 3) or K[0, 0] <= 0 or K[1, 1] <= 0:
            raise ValueError("K must be 3x3 with positive focal entries")
        if np.any(np.tril(K, -1) != 0.0):
            raise ValueError("K must be upper triangular")
        R = np.asarray(self.R_c0, dtype=float)
        if not np.allclose(R.T @ R, np.eye(3), atol=1e-9) or abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise ValueError("R_c0 must be a rotation matrix")

    @property
    def P(self) -> np.ndarray:
        """Projection matrix K [R | t]."""
        return self.K @ np.hstack([self.R_c0, np.reshape(self.t, (3, 1))])

    def in_frame(self, uv: np.ndarray) -> bool:
        width, height = self.resolution
        return bool(0.0 <= uv[0] < width and 0.0 <= uv[1] < height)


@dataclass(frozen=True)
class CameraRig:
    """Three cameras spaced along a bar on the crane king.

    Camera 1 sits at (mount_radial, mount_lateral, mount_height) in the
    king frame; cameras 2 and 3 are displaced along camera 1's image x
    axis by delta12 and delta12 + delta23.

    Attributes:
    -----------
    focal : float
        Focal length of all cameras [px]
    principal : tuple
        Principal point (c_u, c_v) [px]
    resolution : tuple
        (width, height) [px]
    delta12, delta23 : float
        Camera spacings [m]
    mount_radial, mount_lateral, mount_height : float
        Camera 1 position in the king frame [m]
    marker_offsets : tuple
        Marker distances (Delta1, Delta2) along the cable from the tip [m]
    pixel_noise_sigma : float
        Standard deviation of the centroid noise [px]
    quantize : bool
        Round centroids to whole pixels
    """

    focal: float = 1800.0
    principal: Tuple[float, float] = (640.0, 360.0)
    resolution: Tuple[int, int] = (1280, 720)
    delta12: float = 0.24
    delta23: float = 0.24
    mount_radial: float = 0.3
    mount_lateral: float = 0.24
    mount_height: float = 0.711
    marker_offsets: Tuple[float, float] = (0.3, 0.6)
    pixel_noise_sigma: float = 0.5
    quantize: bool = False

    def __post_init__(self):
        d1, d2 = self.marker_offsets
        if not d2 > d1 > 0:
            raise ValueError("marker offsets must satisfy Delta2 > Delta1 > 0")
        if self.focal <= 0 or self.pixel_noise_sigma < 0:
            raise ValueError("focal must be positive and pixel noise non-negative")
        if self.delta12 <= 0 or self.delta23 <= 0:
            raise ValueError("camera spacings must be positive")

    @property
    def K(self) -> np.ndarray:
        return np.array([
            [self.focal, 0.0, self.principal[0]],
            [0.0, self.focal, self.principal[1]],
            [0.0, 0.0, 1.0],
        ])

    @property
    def translations(self) -> Tuple[np.ndarray, ...]:
        e1 = np.array([1.0, 0.0, 0.0])
        return (
            np.zeros(3),
            -self.delta12 * e1,
            -(self.delta12 + self.delta23) * e1,
        )

    def posed(self, q1: float) -> Tuple[Tuple[CameraModel, ...], np.ndarray]:
        """Cameras for slew angle q1 and camera 1's inertial position."""
        R01 = slew_rotation(q1)
        R_c0 = (R01 @ _CAMERA_IN_FRAME1).T
        K = self.K
        cameras = tuple(
            CameraModel(K=K, R_c0=R_c0, t=t, resolution=self.resolution)
            for t in self.translations
        )
        p_0c1 = R01 @ np.array([self.mount_radial, self.mount_lateral, self.mount_height])
        return cameras, p_0c1


@dataclass(frozen=True)
class PixelObservation:
    """Marker centroids of one frame triple.

    pixels[i, j] is (u, v) of marker j in camera i; valid[i] flags
    cameras that saw both markers inside the image.
    """

    pixels: np.ndarray
    valid: np.ndarray
    cameras: Tuple[CameraModel, ...]

    @property
    def n_valid(self) -> int:
        return int(np.count_nonzero(self.valid))


def marker_world_positions(
    sim: SimState, rig: CameraRig, geom: CraneGeometry
) -> Tuple[np.ndarray, np.ndarray]:
    """Marker centres relative to camera 1, in inertial axes [m]."""
    _, p_0c1 = rig.posed(sim.joints.q1)
    p05 = forward_kinematics(sim.joints, geom).p05
    r = cable_direction(sim.pendulum.phi_x, sim.pendulum.phi_y)
    base = p05 - p_0c1
    d1, d2 = rig.marker_offsets
    return base + d1 * r, base + d2 * r


def project_marker(X: np.ndarray, cam: CameraModel) -> Tuple[np.ndarray, bool]:
    """Pixel coordinates of X and whether they fall inside the image.

    Raises:
    -------
    BehindCamera
        If X has non-positive depth in this camera
    """
    x_cam = cam.R_c0 @ np.asarray(X, dtype=float) + cam.t
    if x_cam[2] <= 0.0:
        raise BehindCamera(f"point at depth {x_cam[2]:.4f} m")
    x_img = cam.K @ x_cam
    uv = x_img[:2] / x_img[2]
    return uv, cam.in_frame(uv)


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def synthesize_observations(
    sim: SimState, rig: CameraRig, geom: CraneGeometry, rng: SeedLike = None
) -> PixelObservation:
    """Noisy centroids of both markers in all three cameras.

    Every call draws the same number of normal variates, so runs with
    the same generator stay reproducible whatever the visibility.
    """
    rng = as_generator(rng)
    cameras, _ = rig.posed(sim.joints.q1)
    markers = marker_world_positions(sim, rig, geom)
    noise = rng.normal(0.0, rig.pixel_noise_sigma, size=(NUM_CAMERAS, NUM_MARKERS, 2))

    pixels = np.full((NUM_CAMERAS, NUM_MARKERS, 2), np.nan)
    valid = np.zeros(NUM_CAMERAS, dtype=bool)
    for i, cam in enumerate(cameras):
        seen = True
        for j, X in enumerate(markers):
            try:
                uv, _ = project_marker(X, cam)
            except BehindCamera:
                seen = False
                break
            uv = uv + noise[i, j] if rig.pixel_noise_sigma > 0 else uv
            if rig.quantize:
                uv = np.round(uv)
            seen = seen and cam.in_frame(uv)
            pixels[i, j] = uv
        if not seen:
            continue
        if pixels[i, 0, 1] > pixels[i, 1, 1]:
            pixels[i] = pixels[i, ::-1].copy()
        valid[i] = True

    if not valid.all():
        logger.debug("cameras %s lost a marker", np.flatnonzero(~valid).tolist())
    return PixelObservation(pixels=pixels, valid=valid, cameras=cameras)
