import numpy as np
import pytest
from hypothesis import settings

from isoperim import build_space, make_profile

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def plane():
    return build_space("euclidean_box", n=2, halfwidth=4.0, resolution=256)


@pytest.fixture(scope="session")
def sphere2():
    return build_space("sphere", n=2, resolution=128)


@pytest.fixture(scope="session")
def gauss_line():
    return build_space("log_concave", p=2.0, n=1, resolution=4096)


@pytest.fixture(scope="session")
def p_plane():
    return make_profile("euclidean", n=2)


@pytest.fixture(scope="session")
def p_sphere():
    return make_profile("sphere", n=2)


@pytest.fixture(scope="session")
def p_gauss():
    return make_profile("log_concave", p=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
