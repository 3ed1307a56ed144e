import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from orbitcal.config import load_config

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


@pytest.fixture(scope="session")
def toolkit():
    return load_config(None)


@pytest.fixture(scope="session")
def system_cfg(toolkit):
    return toolkit.system()


@pytest.fixture(scope="session")
def drag_space(toolkit):
    return toolkit.parameter_space("drag")


@pytest.fixture(scope="session")
def pwc_space(toolkit):
    return toolkit.parameter_space("pwc")


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
