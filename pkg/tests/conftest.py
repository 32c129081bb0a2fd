import pytest

from helpers import SQRT2M1, twist_linear
from rotlab.cover import perturbed_rotation


@pytest.fixture
def twist_u():
    return twist_linear()


@pytest.fixture
def perturbed():
    return perturbed_rotation(SQRT2M1, 0.005)


# one PASS/FAIL line per acceptance criterion, shown after the run
_CRITERIA = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    status = "PASS" if report.passed else "FAIL"
    _CRITERIA[crit] = f"{status}  {crit}  ({report.duration:.1f}s)"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k.split(".")[0])):
        terminalreporter.write_line(_CRITERIA[key])
