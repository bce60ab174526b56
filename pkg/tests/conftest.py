import pytest

# Filled by tests/test_acceptance.py: (criterion, passed, detail) in run order.
CRITERIA = []


@pytest.fixture
def record_criterion():
    def record(name, passed, detail):
        CRITERIA.append((name, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
