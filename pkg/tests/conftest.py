import numpy as np
import pytest

from stealthtour.scenario import generate_instance


@pytest.fixture
def cross():
    return generate_instance("cross", 7)


@pytest.fixture
def grid():
    return generate_instance("grid", 7)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
