import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_square():
    from polyff.mesh import Polygon

    return Polygon([[-0.5, -0.5, 0], [0.5, -0.5, 0], [0.5, 0.5, 0], [-0.5, 0.5, 0]], name="square")


def random_unit(rng, n=None):
    d = rng.normal(size=(n or 1, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return d if n else d[0]
