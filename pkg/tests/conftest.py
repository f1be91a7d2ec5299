import numpy as np
import pytest

from hazband.process import CountingPath, RiskPath
from hazband.stepfun import StepFunction, TimeInterval


@pytest.fixture
def simple_pair():
    """Two simple jumps: t=1 with Y=4, t=2 with Y=2."""
    events = CountingPath(np.array([1.0, 2.0]), np.array([1, 1]))
    risk = RiskPath(
        StepFunction(4.0, np.array([1.5]), np.array([2.0]), TimeInterval(0.0, 3.0))
    )
    return events, risk


def make_risk(initial, breakpoints, values, end):
    return RiskPath(
        StepFunction(
            float(initial),
            np.asarray(breakpoints, dtype=float),
            np.asarray(values, dtype=float),
            TimeInterval(0.0, float(end)),
        )
    )
