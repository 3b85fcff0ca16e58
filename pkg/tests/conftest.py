import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dnaouter.fixtures import EXAMPLE_A, EXAMPLE_H, EXAMPLE_W
from dnaouter.params import ChannelParams, CodeConfig

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def toy():
    return CodeConfig.from_parity_check(EXAMPLE_H, w=EXAMPLE_W, a=EXAMPLE_A)


@pytest.fixture(scope="session")
def toy_params():
    return ChannelParams(0.8, 0.1, 0.1, EXAMPLE_W + EXAMPLE_A)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
