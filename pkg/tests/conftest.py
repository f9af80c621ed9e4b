import numpy as np
import pytest

from infogeo.deformed import make_family
from infogeo.grid import build_grid
from infogeo.measure import make_reference


@pytest.fixture(scope="session")
def balanced():
    return make_family("balanced")


@pytest.fixture(scope="session")
def kaniadakis():
    return make_family("kaniadakis")


@pytest.fixture(scope="session")
def mu_smooth1():
    return make_reference(1.0, "smooth")


@pytest.fixture(scope="session")
def mu_simple2():
    return make_reference(2.0, "simple")


@pytest.fixture(scope="session")
def grid_mid():
    return build_grid(1, 20.0, 801)


@pytest.fixture(scope="session")
def grid_small():
    return build_grid(1, 10.0, 201)


def rng_stream(seed, stream=0):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))
