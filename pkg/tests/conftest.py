import pytest
from hypothesis import settings

from pdet.diffop import bundled_operator

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def d0():
    return bundled_operator("d0")


@pytest.fixture(scope="session")
def intro():
    return bundled_operator("intro")


@pytest.fixture(scope="session")
def minus_d1():
    return bundled_operator("minus_d1")


@pytest.fixture(scope="session")
def d1():
    return bundled_operator("d1")
