"""Shared pytest plumbing: collect acceptance-criterion verdict lines and
replay them in the terminal summary so they are visible without -s."""

CRITERION_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)
