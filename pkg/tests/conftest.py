import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def record_criterion(request):
    """Store the verdict of one acceptance criterion for the final summary."""
    results = request.config.stash[_RESULTS]

    def record(number: int, status: str, detail: str = ""):
        results[number] = (status, detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        status, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {status:<4} {detail}")
