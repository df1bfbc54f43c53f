import numpy as np
import pytest

from lurecert.lti import validate_tf

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def g2():
    """1/((s+1)(s+2)): max Re G = 0.5 at w = 0."""
    return validate_tf([1], [1, 3, 2])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
