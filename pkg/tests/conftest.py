import pytest

from model.chemistry import EquilibriumConstants
from utility.settings import get_settings


@pytest.fixture
def k():
    return EquilibriumConstants()


@pytest.fixture
def fresh_settings():
    """Settings re-read from the environment for the duration of a test"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
