"""Shared fixtures plus the acceptance-criteria summary.

Tests in test_acceptance.py carry a ``criterion(number, label)`` marker;
after the run a one-line PASS/FAIL verdict per criterion is printed.
"""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, label): acceptance criterion verdict line"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, label = marker.args
    if report.when == "call":
        _RESULTS[number] = (label, report.passed)
    elif report.failed:  # setup/teardown error counts as a failure
        _RESULTS[number] = (label, False)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        label, passed = _RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {label}")
