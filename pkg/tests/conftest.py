import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def _report(label: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
