import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from radar_ibi.synth import DT

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def dt():
    return DT


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    rows = acceptance_log.lines()
    if rows:
        terminalreporter.section("acceptance criteria")
        for row in rows:
            terminalreporter.write_line(row)
