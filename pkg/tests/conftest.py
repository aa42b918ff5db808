import pytest
from hypothesis import HealthCheck, settings

from sieve_bounds.regions import tables_for

# compiled kernels make the first call slow; no per-example deadline
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def tb52():
    return tables_for(0.52)


@pytest.fixture(scope="session")
def tb524():
    return tables_for(0.524)
