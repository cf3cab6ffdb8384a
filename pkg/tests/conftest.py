import numpy as np
import pytest

from dynheat import default_setup

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def reference_setup():
    return default_setup(256, 512)


@pytest.fixture(scope="session")
def coarse_setup():
    return default_setup(32, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
