"""Shared pytest hooks.

The acceptance tests record one human-readable pass/fail line each; those
lines are replayed in the terminal summary so the verdicts are visible even
when the tests pass and their stdout is captured.
"""

acceptance_report = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_report:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in acceptance_report:
        terminalreporter.write_line(line)
