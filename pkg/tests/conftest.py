import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from modspace.lattice import GridSpec

settings.register_profile("modspace", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("modspace")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid16():
    return GridSpec.self_dual(1, 16)


@pytest.fixture
def grid32():
    return GridSpec.self_dual(1, 32)
