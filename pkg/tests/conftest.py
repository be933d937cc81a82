import sys


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    summary = getattr(module, "SUMMARY", None)
    if not summary:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(summary):
        terminalreporter.write_line(summary[n])
