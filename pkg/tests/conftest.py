import numpy as np
import pytest

from qlsfi.model import AtomModel, FockBand, PulseEnvelope, SpaceGrid

# one line per acceptance criterion, printed in the terminal summary
criterion_lines = []


@pytest.fixture(scope="session")
def criteria_log():
    return criterion_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in criterion_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_grid():
    return SpaceGrid(x_max=20.0, nx=201)


@pytest.fixture(scope="session")
def small_atom(small_grid):
    return AtomModel(grid=small_grid)


@pytest.fixture(scope="session")
def tiny_band():
    return FockBand(n_min=0, n_max=3)


@pytest.fixture(scope="session")
def one_cycle_env():
    return PulseEnvelope(ramp_up_cycles=0.0, flat_cycles=1.0,
                         ramp_down_cycles=0.0,
                         cycle_period=2.0 * np.pi / 0.8)
