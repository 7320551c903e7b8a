import numpy as np
import pytest

from convexlab.geometry import (
    Ellipsoid,
    cross_polytope,
    cube,
    random_symmetric_polytope,
)


@pytest.fixture
def square():
    return cube(2)


@pytest.fixture
def cross2():
    return cross_polytope(2)


@pytest.fixture
def disk():
    return Ellipsoid.ball(2)


@pytest.fixture
def random_bodies_2d():
    return [random_symmetric_polytope(2, 8, seed=s) for s in range(5)]


@pytest.fixture
def random_bodies_3d():
    return [random_symmetric_polytope(3, 10, seed=s) for s in range(3)]


def assert_allclose(a, b, atol=1e-12, rtol=0.0):
    np.testing.assert_allclose(a, b, atol=atol, rtol=rtol)
