import numpy as np
import pytest
from hypothesis import settings

from dirac_hartree.spectral import SpectralGrid

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid64():
    return SpectralGrid(64, 8 * np.pi)


@pytest.fixture(scope="session")
def grid128():
    return SpectralGrid(128, 16 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(RESULTS):
        terminalreporter.write_line(line)
