import numpy as np
import pytest

from qskyrm import GridSpec, balanced_switch_state


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(nx=128, ny=128, half_extent=4.0, waist=1.0)


@pytest.fixture(scope="session")
def mid_grid():
    return GridSpec(nx=256, ny=256, half_extent=4.0, waist=1.0)


@pytest.fixture(scope="session")
def binary_state():
    return balanced_switch_state((0, -2, -4))


@pytest.fixture(scope="session")
def triple_state():
    return balanced_switch_state((0, -3, -6))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
