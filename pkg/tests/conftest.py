import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from windowqpi.forward import ObjectSpec


def smooth_object(seed, n=32, pad_factor=6, phase_range=3.0, amp_range=(0.2, 1.0), sigma=3.0):
    """Small smooth complex object built without windowqpi.objects."""
    rng = np.random.default_rng(seed)

    def unit(a):
        a = gaussian_filter(a, sigma)
        return (a - a.min()) / (a.max() - a.min())

    amp = amp_range[0] + (amp_range[1] - amp_range[0]) * unit(rng.standard_normal((n, n)))
    phase = phase_range * unit(rng.standard_normal((n, n)))
    return ObjectSpec(amp, phase, None, pad_factor)


@pytest.fixture
def small_object():
    return smooth_object(0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
