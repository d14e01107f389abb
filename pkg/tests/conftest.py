import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


def random_spd(rng, d):
    B = rng.normal(size=(d, d))
    return B.T @ B + np.eye(d)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
