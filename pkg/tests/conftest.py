"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line per criterion."""

import re

import pytest

_DETAILS: dict[int, str] = {}
_OUTCOMES: dict[int, bool] = {}
_TITLES: dict[int, str] = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


@pytest.fixture
def criterion_detail(request):
    """Callable that attaches a one-line measurement to the running criterion."""
    m = _PATTERN.search(request.node.nodeid)
    number = int(m.group(1)) if m else -1

    def record(text: str) -> None:
        _DETAILS[number] = text

    return record


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m or report.when not in ("setup", "call"):
        return
    number = int(m.group(1))
    _TITLES[number] = m.group(2).replace("_", " ")
    if report.when == "setup" and not report.passed:
        _OUTCOMES[number] = False
    elif report.when == "call":
        _OUTCOMES[number] = _OUTCOMES.get(number, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        status = "PASS" if _OUTCOMES[number] else "FAIL"
        detail = _DETAILS.get(number, "")
        line = f"criterion {number} ({_TITLES[number]}): {status}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
