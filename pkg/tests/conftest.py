import sys

import numpy as np
import pytest

from squeezesar.scene import generate_bar_chart


@pytest.fixture(scope="session")
def chart():
    """200 x 200, three groups: the chart the sweep presets use."""
    return generate_bar_chart(200, 200, n_groups=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



def pytest_terminal_summary(terminalreporter):
    """Print the acceptance lines collected by ``test_acceptance.report``."""
    lines = []
    for name, module in list(sys.modules.items()):
        if name.rsplit(".", 1)[-1] == "test_acceptance":
            lines.extend(getattr(module, "RESULTS", []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
