"""Shared pytest plumbing: acceptance-criterion summary lines."""

ACCEPTANCE_LINES = []


def record_criterion(number: int, name: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number} ({name}): {status}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
