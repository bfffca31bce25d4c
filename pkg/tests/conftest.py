import math

import pytest

from eberhard.kinematics import PreferredFrame, SiderealClock, TachyonSpeed
from eberhard.optics import PolarizerSettings, RateModel
from eberhard.simulator import SimConfig
from eberhard.window import Geometry


@pytest.fixture
def qm_cfg():
    return SimConfig(rm=RateModel(1.14, 12.05, 0.3, 4.0), pol=PolarizerSettings(), n_days=21, seed=2024)


@pytest.fixture
def eberhard_cfg():
    return SimConfig(
        geometry=Geometry(1.75, 0.0, 280e-6),
        pf=PreferredFrame(1.2e-3, math.pi / 2),
        ts=TachyonSpeed(1e3),
        clock=SiderealClock(),
        n_days=21,
        eta=0.0,
        seed=7,
    )


_CRITERIA = []


@pytest.fixture
def criterion_log():
    return _CRITERIA


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
