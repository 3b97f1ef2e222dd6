import numpy as np
import pytest

from gaussent.fixtures import reference_cm, symmetric_family_cm

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ref():
    return reference_cm()


@pytest.fixture
def sym_family():
    return symmetric_family_cm


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
