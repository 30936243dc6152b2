"""Shared pytest plumbing: the acceptance tests each carry a `criterion`
marker; outcomes are echoed as one line per criterion in the terminal
summary so the pass/fail status is visible without -s."""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(n, title): acceptance criterion metadata")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    _RESULTS[n] = (title, rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for n in sorted(_RESULTS):
        title, passed = _RESULTS[n]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d} [{status}] {title}")
