import pytest
from hypothesis import HealthCheck, settings

from rdpair.fixtures import build_fixture

# derandomized so that repeated runs print identical output
settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance():
    """Record one line per acceptance criterion; printed in the terminal summary."""

    def record(number, passed, detail):
        _ACCEPTANCE[number] = (passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


_PAIRS = {}


@pytest.fixture(scope="session")
def pair():
    """Cached fixture builder (models are rebuilt cheaply but balls are not)."""

    def get(name):
        if name not in _PAIRS:
            _PAIRS[name] = build_fixture(name)
        return _PAIRS[name]

    return get
