import numpy as np
import pytest

from curvepulse import SynthesisSpec, calibrate_to_slope, t_min

# The smoothing comparison budgets are quoted as peak slope in
# time-normalized units (slope times total pulse duration); divide by
# the order-2 phi=0 duration to get the absolute targets used here.
LEGEND_BUDGETS = (450.0, 525.0, 600.0, 675.0)


@pytest.fixture(scope="session")
def phi0_spec():
    return SynthesisSpec(phi=0.0, order=2)


@pytest.fixture(scope="session")
def calibrated_reports(phi0_spec):
    """Curve- and direct-smoothed pulses calibrated to the four matched
    slope budgets; shared across smoothing and acceptance tests."""
    T = t_min(phi0_spec)
    out = {}
    for legend in LEGEND_BUDGETS:
        budget = legend / T
        out[("cs", legend)] = calibrate_to_slope("cs", phi0_spec, budget)
        out[("ds", legend)] = calibrate_to_slope("ds", phi0_spec, budget)
    return out


def rotate_point(x, y, angle):
    c, s = np.cos(angle), np.sin(angle)
    return c * x - s * y, s * x + c * y
