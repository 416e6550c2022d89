import numpy as np
import pytest

from vortexcyl import BodyParams, ChartState, VortexSet


@pytest.fixture
def body():
    return BodyParams(mass=np.pi, inertia=1.0, radius=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_vortices(rng, n, r_min=1.6, r_max=3.0):
    """Admissible strengths and positions, well clear of the body."""
    strengths = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
    radii = rng.uniform(r_min, r_max, n)
    angles = rng.uniform(0.0, 2.0 * np.pi, n)
    positions = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
    return VortexSet(strengths, positions)


def random_state(rng, chart, n=2, scale=1.0):
    vs = random_vortices(rng, n)
    return ChartState(chart, scale * rng.normal(size=3), vs.positions), vs.strengths
