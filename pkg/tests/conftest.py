import sys
from collections import OrderedDict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stsgkit.reduction import Cnf3Formula, build_mppwg_reduction  # noqa: E402

_criteria = OrderedDict()
_notes = []


@pytest.fixture(scope="session")
def example_formula():
    return Cnf3Formula(3, [(1, -2, 3), (-1, 2, -3)])


@pytest.fixture(scope="session")
def example_gadget(example_formula):
    return build_mppwg_reduction(example_formula)


@pytest.fixture(scope="session")
def acceptance_notes():
    """Lines appended here are printed with the acceptance summary."""
    return _notes


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, name = marker.args
    entry = _criteria.setdefault(number, {"name": name, "passed": True, "tests": []})
    entry["passed"] &= report.passed
    if report.when == "call" or report.failed:
        entry["tests"].append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        terminalreporter.write_line("criterion %d %-28s %s" % (
            number, entry["name"], "PASS" if entry["passed"] else "FAIL"))
        for test, ok in entry["tests"]:
            if not ok:
                terminalreporter.write_line("    failed: %s" % test)
    for line in _notes:
        terminalreporter.write_line(line)
