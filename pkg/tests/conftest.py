import pytest

_REPORT = []


@pytest.fixture
def criterion(request):
    """Record a criterion verdict: ``criterion(label, measured, tolerance, ok)``."""

    def record(label, measured, tolerance, ok):
        _REPORT.append((label, measured, tolerance, bool(ok)))
        line = f"{'PASS' if ok else 'FAIL'}  {label}: measured {measured}, tolerance {tolerance}"
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for label, measured, tolerance, ok in _REPORT:
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  {label}: measured {measured}, tolerance {tolerance}")
