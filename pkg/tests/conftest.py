import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gridgrow import parse_grid  # noqa: E402
import acceptance_log  # noqa: E402
import oracles  # noqa: E402


@pytest.fixture
def skew_merged():
    return parse_grid(oracles.SKEW_MERGED)


@pytest.fixture
def juxtaposition():
    return parse_grid(oracles.JUXTAPOSITION)


@pytest.fixture
def corner_321():
    return parse_grid(oracles.CORNER_321)


@pytest.fixture
def l_shape():
    return parse_grid(oracles.L_SHAPE)


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
