import numpy as np
import pytest

from rollkin.geometry import (
    catenoid,
    cylinder,
    ellipsoid,
    plane,
    sphere,
    torus,
    unduloid,
)


@pytest.fixture(scope="session")
def charts():
    """The built-in test surfaces, built once per session."""
    return {
        "plane": plane(),
        "sphere": sphere(1.0),
        "cylinder": cylinder(1.0),
        "ellipsoid": ellipsoid(1.5, 1.0, 0.75),
        "torus": torus(2.0, 1.0),
        "catenoid": catenoid(1.0),
        "unduloid": unduloid(H=1.0, neck=0.3),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_interior_point(chart, rng, inset=0.1):
    (u0, u1), (v0, v1) = chart.domain_inset(inset)
    return float(rng.uniform(u0, u1)), float(rng.uniform(v0, v1))
