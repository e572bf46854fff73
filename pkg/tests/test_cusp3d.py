import numpy as np
import pytest

from pinchlab import constants
from pinchlab.cusp import fit_growth_exponent
from pinchlab.cusp3d import (Torus3DGrid, average, averaging_defect,
                             lichnerowicz_cusp_3d)
from pinchlab.grids import radial_grid
from pinchlab.metrics import SymRadialTensor
from pinchlab.models import cusp_metric
from pinchlab.operators import linearized_einstein

STEP = 5e-3


@pytest.fixture(scope="module")
def r_grid():
    return radial_grid(0.0, 4.0, STEP)


def _field(r, n=16):
    def fn(x1, x2, rr):
        out = np.zeros(x1.shape + (3, 3))
        base = np.exp(-2 * rr)
        out[..., 0, 0] = (1 + 0.5 * np.sin(2 * np.pi * x1)) * base
        out[..., 1, 1] = -(1 + 0.3 * np.cos(2 * np.pi * x2)) * base
        out[..., 2, 2] = 0.2 * np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * x2) * np.exp(-rr)
        out[..., 0, 2] = out[..., 2, 0] = 0.1 * np.cos(2 * np.pi * x2) * np.exp(-rr)
        return out

    return Torus3DGrid.from_function(r, n, n, fn)


def test_average_of_radial_field_is_identity(r_grid):
    def fn(x1, x2, rr):
        out = np.zeros(x1.shape + (3, 3))
        out[..., 0, 0] = np.exp(-2 * rr) * 0.7
        out[..., 2, 2] = np.exp(-rr) * 0.4
        return out

    field = Torus3DGrid.from_function(r_grid, 8, 8, fn)
    avg = average(field)
    assert np.max(np.abs(avg.comps - field.comps[:, 0, 0])) < 1e-14


def test_average_kills_oscillations(r_grid):
    field = _field(r_grid)
    avg = average(field)
    # mean of sin/cos over a full period vanishes; h22 mean is -e^{-2r}
    assert np.max(np.abs(avg.comps[:, 1, 1] + np.exp(-2 * r_grid))) < 1e-13
    assert np.max(np.abs(avg.comps[:, 2, 2])) < 1e-13


def test_average_commutes_with_trace(r_grid):
    field = _field(r_grid)
    met = cusp_metric(0.0, 4.0, STEP)
    avg_then_trace = average(field).trace(met)
    g_inv = np.zeros((r_grid.size, 3, 3))
    g_inv[:, 0, 0] = np.exp(2 * r_grid)
    g_inv[:, 1, 1] = np.exp(2 * r_grid)
    g_inv[:, 2, 2] = 1.0
    trace_field = np.einsum("nxymv,nmv->nxy", field.comps, g_inv)
    trace_then_avg = trace_field.mean(axis=(1, 2))
    assert np.max(np.abs(avg_then_trace - trace_then_avg)) < 1e-12


def test_averaging_commutes_with_linearized_operator(r_grid):
    field = _field(r_grid)
    met = cusp_metric(0.0, 4.0, STEP)
    lhs = average(lichnerowicz_cusp_3d(field))
    rhs = linearized_einstein(average(field), met)
    gap = SymRadialTensor(r_grid, lhs.comps - rhs.comps).frame_norm(met)
    assert np.max(gap[6:-6]) <= 1e-6  # composed radial stencils need a margin


def test_3d_operator_matches_radial_on_radial_fields(r_grid):
    def fn(x1, x2, rr):
        out = np.zeros(x1.shape + (3, 3))
        out[..., 0, 0] = 0.7 * np.exp(-2 * rr)
        out[..., 2, 2] = 0.4 * np.exp(-rr)
        return out

    field = Torus3DGrid.from_function(r_grid, 8, 8, fn)
    met = cusp_metric(0.0, 4.0, STEP)
    out3d = lichnerowicz_cusp_3d(field)
    rad = linearized_einstein(average(field), met)
    gap = np.abs(out3d.comps[:, 0, 0] - rad.comps)
    assert np.max(gap[6:-6]) < 1e-8


def test_averaging_estimate(r_grid):
    field = _field(r_grid)
    defect, c1max, diam = averaging_defect(field)
    interior = slice(3, -3)
    ratio = defect[interior] / (diam * np.exp(-r_grid[interior]) * c1max[interior])
    assert np.max(ratio) <= constants.AVERAGING_C
    # the defect relative to the slice C1 size decays like e^{-r}
    slope = fit_growth_exponent(r_grid[interior], (defect / c1max)[interior],
                                window=(0.5, 3.5))
    assert slope == pytest.approx(-1.0, abs=0.15)
