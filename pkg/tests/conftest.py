import numpy as np
import pytest

from leoship.model import default_scenario


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(RESULTS, key=int):
        terminalreporter.write_line(RESULTS[cid].line())
