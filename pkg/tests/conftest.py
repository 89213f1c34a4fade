import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def accept():
    """Record and print one pass/fail line per acceptance criterion."""

    def _record(number, description, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        line = f"ACCEPTANCE {number:2d} {status} - {description}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line, flush=True)
        assert passed, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
