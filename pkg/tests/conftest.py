import numpy as np
import pytest

from latentatlas import PointCloud


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_cloud(rng):
    """50 random points in R^5."""
    return PointCloud(points=rng.standard_normal((50, 5)))


def make_plane_cloud(n=200, ambient=8, seed=0, noise=0.0):
    """Isotropic samples on a 2-plane embedded in the first two axes."""
    gen = np.random.default_rng(seed)
    pts = np.zeros((n, ambient))
    pts[:, 0] = gen.uniform(-1, 1, n)
    pts[:, 1] = gen.uniform(-1, 1, n)
    if noise:
        pts += noise * gen.standard_normal((n, ambient))
    return PointCloud(points=pts)
