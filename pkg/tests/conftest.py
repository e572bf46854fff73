import numpy as np
import pytest

from pinchlab.grids import radial_grid
from pinchlab.metrics import SymRadialTensor, WarpedMetric
from pinchlab.models import cusp_metric, drilling_interpolation, hyperbolic_tube


@pytest.fixture(scope="session")
def tube():
    metric, _ = hyperbolic_tube(0.01, 3.0, step=1e-3)
    return metric


@pytest.fixture(scope="session")
def cusp_window():
    return cusp_metric(-5.0, 5.0, 1e-3)


@pytest.fixture(scope="session")
def cusp_one_sided():
    return cusp_metric(0.0, 8.0, 2e-3)


@pytest.fixture(scope="session")
def drilling5():
    return drilling_interpolation(5.0, step=1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def smooth_field(metric, rng, envelope=None, scale=0.3):
    """Random smooth radial tensor with O(scale) frame components."""
    r = metric.r
    env = np.ones_like(r) if envelope is None else envelope
    w = metric.frame_weights()
    frame = np.zeros((r.size, 3, 3))
    for i in range(3):
        for j in range(i, 3):
            amp = rng.normal(size=3) * scale
            freq = rng.uniform(0.2, 1.8, size=3)
            phase = rng.uniform(0, 2 * np.pi, size=3)
            vals = env * sum(a * np.sin(f * r + p) for a, f, p in zip(amp, freq, phase))
            frame[:, i, j] = vals
            frame[:, j, i] = vals
    return SymRadialTensor(r, frame * (w[:, :, None] * w[:, None, :]))


def compact_envelope(r, margin=0.5):
    """Analytic window, below 1e-15 at the ends (no finite regularity kinks)."""
    lo, hi = r[0] + margin, r[-1] - margin
    mid = 0.5 * (lo + hi)
    x = (r - mid) / ((hi - lo) / 2 / 2.43)
    return np.exp(-(x**4))
