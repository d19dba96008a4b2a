import pytest
from hypothesis import HealthCheck, settings

from zipent.alphabets import AlphabetPair
from zipent.measure import MeasureSpec
from zipent.space import SubZipShift

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ex31():
    return AlphabetPair(("0", "1", "2", "3"), ("a", "b"), {"0": "a", "1": "b", "2": "a", "3": "b"})


@pytest.fixture
def ex31_mu(ex31):
    return MeasureSpec.uniform(ex31)


@pytest.fixture
def ex2():
    pair = AlphabetPair(("0", "1", "2", "3"), ("a", "b"), {"0": "a", "1": "a", "2": "b", "3": "b"})
    return SubZipShift.with_words(pair, "Z", ["ab", "ba"])


@pytest.fixture
def golden():
    return SubZipShift.with_words(AlphabetPair.identity("01"), "S", ["11"])


@pytest.fixture
def fibers21():
    return AlphabetPair(("0", "1", "2"), ("a", "b"), {"0": "a", "1": "a", "2": "b"})


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
