import pytest
from hypothesis import HealthCheck, settings

from src.gen_tables import expand_A, expand_B
from src.wz_engine import find_certificate

settings.register_profile(
    'default',
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile('default')


@pytest.fixture(scope='session')
def b_table():
    return expand_B(12)


@pytest.fixture(scope='session')
def a_table():
    return expand_A(12)


@pytest.fixture(scope='session')
def certificate():
    return find_certificate()
