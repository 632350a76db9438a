from __future__ import annotations

import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match or "test_acceptance" not in report.nodeid:
        return
    n = int(match.group(1))
    if report.when == "call" or report.failed:
        status = "PASS" if report.passed else "FAIL"
        if _results.get(n, ("PASS",))[0] == "FAIL":
            return
        doc = report.nodeid.split("::")[-1]
        _results[n] = (status, doc)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, name = _results[n]
        terminalreporter.write_line(f"criterion {n}: {status}  ({name})")


@pytest.fixture(scope="session")
def bool_domain():
    from provcause.domain import Domain

    return Domain.boolean()
