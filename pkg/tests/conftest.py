import sys

import pytest
from hypothesis import settings

from nilcone.gf import make_field

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def F2():
    return make_field(2)


@pytest.fixture(scope="session")
def F3():
    return make_field(3)


@pytest.fixture(scope="session")
def F4():
    return make_field(2, 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", [])
    if results:
        terminalreporter.section("acceptance criteria")
        for res in sorted(results, key=lambda r: r.number):
            terminalreporter.write_line(res.line())
