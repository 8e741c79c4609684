"""Linear multi-view triangulation and cable-angle measurement."""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from errors import CoincidentMarkers, DegenerateGeometry, InsufficientViews
from vision.camera import CameraModel, PixelObservation

DEGENERACY_RTOL = 1e-9
MIN_MARKER_SEPARATION = 1e-9


@dataclass(frozen=True)
class AngleMeasurement:
    """Cable angles y = (y1, y2) [rad] and the sigma_4 of each marker."""

    y: np.ndarray
    sigma4: np.ndarray
    n_views: int


def stack_constraints(pixels: np.ndarray, cameras: Sequence[CameraModel]) -> np.ndarray:
    """Stack the two DLT rows [v P3 - P2, P1 - u P3] of every view.

    Parameters:
    -----------
    pixels : ndarray
        (n, 2) centroids (u, v), one per camera
    cameras : sequence of CameraModel
        The n cameras that produced them

    Returns:
    --------
    ndarray
        (2n, 4) constraint matrix A with A X~ = 0 for exact data
    """
    rows = []
    for (u, v), cam in zip(pixels, cameras):
        P = cam.P
        rows.append(v * P[2] - P[1])
        rows.append(P[0] - u * P[2])
    return np.array(rows)


def triangulate_point(obs: PixelObservation, marker: int) -> Tuple[np.ndarray, float]:
    """Recover one marker from all valid views.

    The homogeneous solution is the right singular vector of the smallest
    singular value sigma_4, scaled so its last component is +1.

    Returns:
    --------
    tuple
        (X [m] relative to camera 1, sigma_4)

    Raises:
    -------
    InsufficientViews
        If fewer than two cameras are valid
    DegenerateGeometry
        If the nullspace is ambiguous or the point lies at infinity
    """
    idx = np.flatnonzero(obs.valid)
    if idx.size < 2:
        raise InsufficientViews(f"marker {marker} seen by {idx.size} camera(s)")
    A = stack_constraints(obs.pixels[idx, marker], [obs.cameras[i] for i in idx])
    _, S, Vt = np.linalg.svd(A)
    sigma4, sigma3 = S[-1], S[-2]
    if sigma3 <= DEGENERACY_RTOL * S[0] or sigma3 - sigma4 <= DEGENERACY_RTOL * sigma3:
        raise DegenerateGeometry(
            f"two smallest singular values {sigma3:.3e}, {sigma4:.3e} coincide"
        )
    nu = Vt[-1]
    if abs(nu[3]) < 1e-12 * np.linalg.norm(nu):
        raise DegenerateGeometry("triangulated point lies at infinity")
    X = nu[:3] / nu[3]
    return X, float(sigma4)


def measure_angles(X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
    """Cable angles (y1, y2) from two points along the cable.

    Raises:
    -------
    CoincidentMarkers
        If the points are closer than 1e-9 m
    """
    d = np.asarray(X2, dtype=float) - np.asarray(X1, dtype=float)
    norm = float(np.linalg.norm(d))
    if norm <= MIN_MARKER_SEPARATION:
        raise CoincidentMarkers(f"marker separation {norm:.3e} m")
    rx, ry, rz = d / norm
    return np.array([math.atan2(-ry, rz), math.atan2(rx, math.hypot(ry, rz))])


def measure_from_observations(obs: PixelObservation) -> AngleMeasurement:
    """Triangulate both markers and convert them to cable angles."""
    X1, s1 = triangulate_point(obs, 0)
    X2, s2 = triangulate_point(obs, 1)
    return AngleMeasurement(
        y=measure_angles(X1, X2), sigma4=np.array([s1, s2]), n_views=obs.n_valid
    )
