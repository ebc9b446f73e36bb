import numpy as np
import pytest
from hypothesis import strategies as st

from hollowbubble.geometry import FourierShape, SupportShape


def random_shape(rng, max_mode=8, amplitude=0.15, gauge=False):
    """Star-shaped curve whose perturbation has sup norm at most ``amplitude``."""
    a = rng.uniform(-1, 1, max_mode)
    b = rng.uniform(-1, 1, max_mode)
    if gauge:
        a[0] = b[0] = 0.0
    scale = amplitude * rng.uniform(0.3, 1.0) / (np.abs(a).sum() + np.abs(b).sum())
    return FourierShape(max_mode, rng.uniform(-0.05, 0.05), scale * a, scale * b)


@st.composite
def fourier_shapes(draw, max_mode=6, amplitude=0.15):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_shape(np.random.default_rng(seed), max_mode, amplitude)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def random_support(rng, max_mode=8, amplitude=0.1):
    """Convex body near the unit disk: sum (k^2 - 1)|c_k| stays below ``amplitude``."""
    k = np.arange(2, max_mode + 1)
    w = rng.uniform(-1, 1, (2, k.size))
    w *= amplitude * rng.uniform(0.3, 1.0) / (np.abs(w).sum(axis=0) * (k**2 - 1)).sum()
    return SupportShape(max_mode, 1.0, np.r_[0.0, w[0]], np.r_[0.0, w[1]])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
