import numpy as np
import pytest

from vekua_bergman.geometry import build_disk, build_rectangle


@pytest.fixture(scope="session")
def unit_disk():
    return build_disk(0j, 1.0, 32, 64)


@pytest.fixture(scope="session")
def disk_64():
    return build_disk(0j, 1.0, 64, 128)


@pytest.fixture(scope="session")
def unit_square():
    return build_rectangle(0j, 1 + 1j, 8, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
