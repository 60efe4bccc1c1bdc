import math
import sys

import pytest

from ssa_revisit import CONSTANTS

DAY = 86400.0
KM = 1e3
R0_550 = CONSTANTS.rho + 550 * KM


@pytest.fixture
def polar36():
    from ssa_revisit.constellation import ConstellationSpec

    return ConstellationSpec(i=math.pi / 2, t=36, p=3)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
