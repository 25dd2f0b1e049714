import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from thetafock import SpaceConfig

settings.register_profile(
    "thetafock", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("thetafock")


@pytest.fixture
def cfg():
    return SpaceConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel_err(a, b):
    return abs(a - b) / abs(b)
