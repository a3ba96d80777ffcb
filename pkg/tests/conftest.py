import pytest

_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_KEY] = {}


@pytest.fixture
def criterion(request):
    """record(number, passed, detail) adds a line to the acceptance summary."""
    table = request.config.stash[_KEY]

    def record(number, passed, detail):
        table[number] = (passed, detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, config):
    table = config.stash[_KEY]
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(table):
        passed, detail = table[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
