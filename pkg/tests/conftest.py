"""Shared fixtures: stock domains and seeded generators."""

import numpy as np
import pytest

from qelab.geometry import stadium, unit_disk, unit_square


@pytest.fixture(scope="session")
def disk():
    return unit_disk()


@pytest.fixture(scope="session")
def stadium_domain():
    return stadium(1.0, 1.0)


@pytest.fixture(scope="session")
def square():
    return unit_square()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
