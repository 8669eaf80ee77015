import cmath
import math

import pytest

from rismask import reference_scenario, two_state_set


@pytest.fixture(scope="session")
def scenario():
    return reference_scenario()


@pytest.fixture(scope="session")
def ideal_1bit():
    return two_state_set(0.0, math.pi)


def direct_sum(geometry, incident, observe, cell_phase):
    """Plain-loop phasor sum; ``cell_phase(n_x, n_y)`` returns a complex weight."""
    k = 2 * math.pi / geometry.wavelength
    wx = math.sin(incident.theta) * math.cos(incident.phi) + math.sin(observe.theta) * math.cos(observe.phi)
    wy = math.sin(incident.theta) * math.sin(incident.phi) + math.sin(observe.theta) * math.sin(observe.phi)
    total = 0j
    for ny in range(geometry.q_y):
        for nx in range(geometry.q_x):
            total += cell_phase(nx, ny) * cmath.exp(1j * (k * geometry.d_x * wx * nx + k * geometry.d_y * wy * ny))
    return total


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
