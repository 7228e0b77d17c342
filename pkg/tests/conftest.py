import pytest

from rsperiodic.language import LanguageCache
from rsperiodic.specfile import catalog

NAMES = ["random-fibonacci", "random-period-doubling", "aperiodic-five",
         "three-letter", "two-letter-disjoint"]


@pytest.fixture(scope="session")
def rpd():
    return catalog("random-period-doubling")


@pytest.fixture(scope="session")
def fib():
    return catalog("random-fibonacci")


@pytest.fixture(scope="session")
def five():
    return catalog("aperiodic-five")


@pytest.fixture(scope="session")
def tri():
    return catalog("three-letter")


@pytest.fixture(scope="session")
def di():
    return catalog("two-letter-disjoint")


@pytest.fixture(params=NAMES)
def any_sub(request):
    return catalog(request.param)


@pytest.fixture
def fresh_cache(tmp_path):
    return LanguageCache(tmp_path)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
