"""Shared fixtures for the test suite."""

import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest

from kinematics import CraneGeometry, JointState, inverse_kinematics
from kinematics.crane import actuator_range
from vision import CameraRig

START_TIP = np.array([1.27, 1.27, -1.161])


@pytest.fixture
def geom():
    return CraneGeometry()


@pytest.fixture
def rig():
    return CameraRig()


@pytest.fixture
def start_joints(geom):
    """Crane at rest with its tip at the default start position."""
    return inverse_kinematics(START_TIP, geom)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_joints(geom: CraneGeometry, rng: np.random.Generator, with_rates: bool = False) -> JointState:
    """An admissible joint state drawn uniformly over slew and actuator ranges."""
    lo2, hi2 = actuator_range(2, geom)
    lo3, hi3 = actuator_range(3, geom)
    q = np.array([rng.uniform(-np.pi, np.pi), rng.uniform(lo2, hi2), rng.uniform(lo3, hi3)])
    qdot = rng.normal(0.0, 0.1, size=3) if with_rates else np.zeros(3)
    return JointState(q, qdot)
