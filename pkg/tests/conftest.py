"""Shared fixtures and the acceptance summary printed at the end of a run."""
import numpy as np
import pytest

from rdsmeta.base import BaseSystem, build_omega_star
from rdsmeta.cocycle import MatrixCocycle

ACCEPTANCE_LINES = []

A0 = np.array([[0, 1, 0, 0], [1, 1, 0, 1], [0, 0, 1, 1], [1, 0, 1, 0]])
A1 = np.array([[1, 1, 0, 0], [1, 1, 1, 0], [0, 1, 1, 1], [0, 0, 1, 1]])


@pytest.fixture(scope="session")
def ex4():
    """Adjacency cocycle of the 4-state example and its base point."""
    omega = build_omega_star(4, variant="printed")
    return MatrixCocycle({1: A0, 2: A1}, base=BaseSystem(2)), omega


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
