import numpy as np
import pytest

from specqc.spin_system import Spin, SpinSystem, alanine_carbons_preset, alanine_preset

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_system(offsets, couplings, channels=None, gammas=None, t2=None):
    n = len(offsets)
    channels = channels or ["13C"] * n
    gammas = gammas or [1.0] * n
    t2 = t2 or [None] * n
    j = np.zeros((n, n))
    for (a, b), v in couplings.items():
        j[a, b] = j[b, a] = v
    spins = tuple(Spin(f"S{k}", channels[k], offsets[k], gammas[k], t2[k]) for k in range(n))
    return SpinSystem(spins, tuple(map(tuple, j)))


@pytest.fixture
def alanine():
    return alanine_preset()


@pytest.fixture
def carbons():
    return alanine_carbons_preset()


@pytest.fixture
def homonuclear4():
    """Alanine offsets and couplings with every spin on one channel, gamma 1."""
    return make_system(
        [0, -4320, 15793, 1550],
        {(0, 1): 34.94, (0, 2): 53.81, (0, 3): 143.21, (1, 2): -1.2, (1, 3): 5.5, (2, 3): 5.1},
    )
