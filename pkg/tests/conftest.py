from __future__ import annotations

import numpy as np
import pytest

from osbop.reference import DATASET_4_2, FOOD

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def c42() -> np.ndarray:
    return DATASET_4_2.copy()


@pytest.fixture
def food() -> np.ndarray:
    return FOOD.copy()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
