import pytest

_LINES = []


@pytest.fixture
def criterion(request, capsys):
    """``criterion(label, ok, detail)`` prints one PASS/FAIL line and asserts ``ok``."""

    def record(label, ok, detail=""):
        line = f"[acceptance] {label}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
