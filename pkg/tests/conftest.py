import numpy as np
import pytest

from polmodes import default_medium, homogeneous_box, vacuum_interface


@pytest.fixture
def medium():
    return default_medium()


@pytest.fixture
def interface(medium):
    return vacuum_interface(medium, 40.0)


@pytest.fixture
def vacuum_box():
    return homogeneous_box(None, 10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
