import pytest

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        criterion = dict(report.user_properties).get("acceptance")
        if criterion is not None:
            _acceptance.append((criterion, report.outcome, report.nodeid))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, outcome, nodeid in sorted(_acceptance):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {criterion}: {nodeid.split('::')[-1]}")


@pytest.fixture
def criterion(record_property):
    def mark(number):
        record_property("acceptance", number)

    return mark
