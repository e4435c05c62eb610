"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

from collections import defaultdict

import pytest

CRITERIA = {
    1: "asymptotic root table reproduced for f = 1, 2, 3",
    2: "equal resonant lengths give the lone 1.0062i root",
    3: "f = 1 block determinant agrees with the scalar channel equations",
    4: "two-resonance f = 1 potentials show the expected channel structure",
    5: "85Rb f = 2 potentials: attractive and purely repulsive blocks",
    6: "mean-field coefficients equal the closed-form fractions",
    7: "property suites",
}

_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    n = getattr(report, "criterion", None)
    if n is not None:
        _outcomes[n].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        elif all(r == "passed" for r in results):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {text} ({len(results or [])} checks)")
