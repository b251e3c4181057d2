from . import test_acceptance


def pytest_terminal_summary(terminalreporter):
    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(test_acceptance.LINES):
            terminalreporter.write_line(test_acceptance.LINES[key])
