import sys

import numpy as np
import pytest

from qcorr.minimize import OptimizerConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def quick_cfg():
    # fewer restarts and a coarser qubit grid keep the unit tests fast
    return OptimizerConfig(restarts=6, grid=(61, 31))


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, if the acceptance module ran
    mod = sys.modules.get("test_acceptance")
    lines = mod.summary_lines() if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
