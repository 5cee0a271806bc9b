"""Collects acceptance verdicts and prints one line per criterion after the run."""

import pytest

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def record_criterion(request):
    def record(number, title, passed, detail=""):
        ACCEPTANCE_RESULTS[number] = (title, passed, detail)
        print(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title} {detail}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title} {detail}".rstrip())
