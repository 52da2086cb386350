import sys

ACCEPTANCE_LINES = []


def record(line: str):
    """Keep an acceptance verdict for the end-of-run summary and echo it immediately."""
    ACCEPTANCE_LINES.append(line)
    sys.__stdout__.write("\n" + line + "\n")
    sys.__stdout__.flush()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
