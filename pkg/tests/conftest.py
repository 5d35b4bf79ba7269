import pytest

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def record_acceptance():
    def record(key, passed, detail):
        line = f"{key}: {'PASS' if passed else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES[key] = line
        print(line)
        return passed
    return record
