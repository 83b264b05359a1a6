import pytest
from hypothesis import HealthCheck, settings

from rrflow.instances import gen_fig2

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def fig2_unit():
    return gen_fig2(1)


@pytest.fixture
def fig2_cap2():
    return gen_fig2(2)
