import random

import pytest

from sdchain.generators import named_complex

BASE_NAMES = ("delta1", "delta2", "boundary-delta3", "t-graph")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=BASE_NAMES)
def base(request):
    return named_complex(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
