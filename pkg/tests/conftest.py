import math

import pytest
from hypothesis import HealthCheck, settings

from pdcschmidt import Crystal, CrystalConfig

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def bbo():
    return Crystal(CrystalConfig.collinear())


@pytest.fixture(scope="session")
def scales(bbo):
    return bbo.scales()


@pytest.fixture(scope="session")
def noncollinear():
    return Crystal(CrystalConfig(delta0_lc=23.38))


ALPHA = 1.5 * math.pi


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def add(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
