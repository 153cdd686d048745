from __future__ import annotations

import numpy as np
import pytest

from hermite_wavelet.field import GaussianField


@pytest.fixture
def field():
    return GaussianField(12345)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list = []


@pytest.fixture
def acceptance():
    def record(number: int, passed: bool, text: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {text}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
