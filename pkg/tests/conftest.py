import pytest

_LINES = []


@pytest.fixture
def report():
    """Record a PASS/FAIL line for the acceptance summary."""

    def emit(tag, ok, detail=""):
        line = f"{tag}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        _LINES.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
