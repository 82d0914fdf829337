import pytest
from hypothesis import HealthCheck, settings

from grmod import FiniteAbelianGroup, GModule

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def z4_minus_one():
    """Z/4 with the order-2 group acting by -1 over Z[zeta_2]."""
    return GModule.build(FiniteAbelianGroup((2,)), (4,), [[[-1]]])
