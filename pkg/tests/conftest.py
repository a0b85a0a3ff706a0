from pathlib import Path

import pytest

from sentmic.mic import available_backends, use_backend

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(params=available_backends())
def backend(request):
    """Run the test once per importable MIC kernel."""
    previous = use_backend(request.param)
    yield request.param
    use_backend(previous)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
