import pytest

from experiments import counterexample
from spiral import sequence
from utils.config import get_settings


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def seq_2001():
    return sequence.generate(2001)


@pytest.fixture(scope="session")
def seq_10k():
    return sequence.generate(10_000)


@pytest.fixture(scope="session")
def seq_20k():
    return sequence.generate(20_000)


@pytest.fixture(scope="session")
def seq_100k():
    return sequence.generate(100_000)


@pytest.fixture(scope="session")
def sphere_sets(seq_2001):
    return counterexample.build(2000, "sphere", report=seq_2001)


@pytest.fixture(scope="session")
def disk_sets(seq_2001):
    return counterexample.build(2000, "disk", report=seq_2001)
