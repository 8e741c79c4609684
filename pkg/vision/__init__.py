"""Synthetic camera rig and multi-view triangulation of the cable markers."""

from .camera import (
    CameraModel,
    CameraRig,
    PixelObservation,
    as_generator,
    marker_world_positions,
    project_marker,
    synthesize_observations,
)
from .triangulation import (
    AngleMeasurement,
    measure_angles,
    measure_from_observations,
    stack_constraints,
    triangulate_point,
)

__all__ = [
    "AngleMeasurement",
    "CameraModel",
    "CameraRig",
    "PixelObservation",
    "as_generator",
    "marker_world_positions",
    "measure_angles",
    "measure_from_observations",
    "project_marker",
    "stack_constraints",
    "synthesize_observations",
    "triangulate_point",
]
