from collections import defaultdict

import pytest

from tests.helpers import faulted_fleet


@pytest.fixture(scope="session")
def fleet_scenario():
    return faulted_fleet()


# --------------------------------------------------------------------------
# acceptance summary: one line per criterion

_criteria = defaultdict(list)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for mark in getattr(report, "criterion_marks", ()):
        _criteria[mark].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criterion_marks = tuple(m.args[0] for m in item.iter_markers("criterion"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        failed = sum(o != "passed" for o in outcomes)
        detail = f" ({failed} of {len(outcomes)} checks failed)" if failed else f" ({len(outcomes)} checks)"
        terminalreporter.write_line(f"criterion {n}: {status}{detail}")
