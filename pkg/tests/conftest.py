import os

import numpy as np
import pytest

from ppsc.geometry import Window, Realization
from ppsc.simulate import SsiParams, simulate_ssi


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit_window():
    return Window(0.0, 0.0, 10.0, 10.0)


@pytest.fixture
def ssi_realization(unit_window):
    """Moderately packed inhibition pattern; deterministic."""
    return simulate_ssi(unit_window, SsiParams(1.0, 60, 20_000), 101)


@pytest.fixture
def ssi_factory(unit_window):
    """Seed -> deterministic inhibition pattern, for batch-style tests."""

    def make(seed, target=60):
        return simulate_ssi(unit_window, SsiParams(1.0, target, 20_000), seed)

    return make


def make_realization(points, window=None, label=None):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if window is None:
        window = Window(
            float(pts[:, 0].min()) - 1.0,
            float(pts[:, 1].min()) - 1.0,
            float(pts[:, 0].max()) + 1.0,
            float(pts[:, 1].max()) + 1.0,
        )
    return Realization(pts, window, label=label)


@pytest.fixture(scope="session")
def acceptance_cache():
    """Directory reused across runs so the heavy simulations amortize."""
    path = os.environ.get("PPSC_ACCEPTANCE_CACHE", "/tmp/ppsc-acceptance")
    os.makedirs(path, exist_ok=True)
    return path
