"""Shared pytest plumbing: acceptance-criterion result lines."""

import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance_report():
    """Record (and print) a one-line verdict for an acceptance criterion."""
    def _record(number, description, ok):
        line = f"acceptance {number} ({description}): {'PASS' if ok else 'FAIL'}"
        _acceptance_lines.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
