import time

import pytest

_START = time.perf_counter()
SUITE_BUDGET = 120.0
_LINES = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict; the summary prints one line per criterion."""

    def record(number, passed, detail):
        passed = None if passed is None else bool(passed)
        _LINES[number] = (passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    elapsed = time.perf_counter() - _START
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_LINES):
        passed, detail = _LINES[n]
        if n == 9 and passed is True:
            passed = elapsed < SUITE_BUDGET
            detail += f"; full suite {elapsed:.1f} s (< {SUITE_BUDGET:.0f} s)"
        verdict = {True: "PASS", False: "FAIL", None: "EXCLUDED"}[passed]
        tr.write_line(f"criterion {n:2d}: {verdict}  {detail}")
