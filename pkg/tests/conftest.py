import numpy as np
import pytest

from ymcone import geometry, nullcone, sphere

VERTEX_SCHW = np.array([0.0, 10.0, np.pi / 2, 0.0])


@pytest.fixture(scope="session")
def flat_chart():
    return geometry.make_chart("minkowski")


@pytest.fixture(scope="session")
def schw_chart():
    return geometry.make_chart("schwarzschild", mass=1.0)


@pytest.fixture(scope="session")
def flat_bundle(flat_chart):
    grid = sphere.SphereGrid(8, 16)
    return nullcone.NullConeBundle(flat_chart, np.zeros(4), grid,
                                   s_max=1.0, ds=0.005)


@pytest.fixture(scope="session")
def schw_bundle(schw_chart):
    grid = sphere.SphereGrid(6, 12)
    return nullcone.NullConeBundle(schw_chart, VERTEX_SCHW, grid,
                                   s_max=0.5, ds=0.005)
