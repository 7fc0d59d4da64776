import pytest

from spectral_zeros.zeta import find_zeros


@pytest.fixture(scope="session")
def zeros100():
    # one scan for the whole suite; cheap (~0.1 s) but used everywhere
    return find_zeros(100)
