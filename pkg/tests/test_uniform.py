import numpy as np
import pytest

from pinchlab import constants
from pinchlab.exceptions import DomainError, ResolutionError
from pinchlab.lattices import Lattice2D
from pinchlab.uniform import (TorusConformalGrid, associated_flat_metric,
                              flat_torus_lambda1, gauss_bonnet_defect,
                              gauss_curvature, manufactured_recovery_error,
                              recover_rho, spectral_gap_bound)


@pytest.fixture(scope="module")
def unit_lattice():
    return Lattice2D.square(1.0)


def _grid_coords(n):
    x = np.linspace(0, 1, n, endpoint=False)
    return np.meshgrid(x, x, indexing="ij")


def test_gauss_curvature_flat(unit_lattice):
    grid = TorusConformalGrid(unit_lattice, np.zeros((32, 32)))
    assert np.max(np.abs(gauss_curvature(grid))) == 0.0


def test_gauss_curvature_single_mode(unit_lattice):
    x1, _ = _grid_coords(64)
    eps = 0.05
    grid = TorusConformalGrid(unit_lattice, eps * np.sin(2 * np.pi * x1))
    k = gauss_curvature(grid)
    exact = 0.5 * eps * (2 * np.pi) ** 2 * np.sin(2 * np.pi * x1) * np.exp(-grid.rho)
    assert np.max(np.abs(k - exact)) < 1e-12


def test_gauss_bonnet(unit_lattice, rng):
    x1, x2 = _grid_coords(64)
    for _ in range(5):
        rho = sum(rng.normal() * 0.03 * np.sin(2 * np.pi * (kx * x1 + ky * x2) + rng.uniform(0, 6))
                  for kx, ky in ((1, 0), (0, 1), (1, 1), (2, 1)))
        grid = TorusConformalGrid(unit_lattice, rho)
        assert abs(gauss_bonnet_defect(grid)) <= 1e-8


def test_resolution_floor(unit_lattice):
    with pytest.raises(ResolutionError):
        TorusConformalGrid(unit_lattice, np.zeros((4, 4)))


def test_associated_flat_metric_constants(unit_lattice):
    c, grid = associated_flat_metric(np.zeros((16, 16)), unit_lattice)
    assert c == 0.0
    c1, grid1 = associated_flat_metric(np.ones((16, 16)), unit_lattice)
    assert c1 == pytest.approx(-1.0, rel=1e-14)
    x1, _ = _grid_coords(64)
    rho = 0.1 * np.sin(2 * np.pi * x1)
    c2, grid2 = associated_flat_metric(rho, unit_lattice)
    recheck = grid2.integrate_flat(grid2.rho * np.exp(grid2.rho))
    assert abs(recheck) <= 1e-10


def test_recover_rho_zero_curvature(unit_lattice):
    grid, residual = recover_rho(np.zeros((32, 32)), unit_lattice)
    assert np.max(np.abs(grid.rho)) <= 1e-12
    assert residual <= 1e-12


def test_manufactured_recovery(unit_lattice):
    x1, x2 = _grid_coords(64)
    rho_star = 0.05 * np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * x2)
    err, residual, grid, grid_star = manufactured_recovery_error(unit_lattice, rho_star)
    assert err <= 1e-6
    assert residual <= 1e-6


def test_recovery_ratio_bounded(unit_lattice):
    x1, x2 = _grid_coords(64)
    ratios = []
    for amp in (0.1, 0.05, 0.01):
        rho_star = amp * (np.sin(2 * np.pi * x1) + 0.4 * np.cos(2 * np.pi * x2))
        _, _, grid, grid_star = manufactured_recovery_error(unit_lattice, rho_star)
        k = gauss_curvature(grid_star)
        ratios.append(np.max(np.abs(grid.rho)) / np.max(np.abs(k)))
        assert grid.conformal_diameter_bound() <= 1.05  # diameter hypothesis regime
    assert max(ratios) <= constants.UNIFORMIZATION_C


def test_spectral_gap_closed_form():
    assert spectral_gap_bound(1.0, 2) == pytest.approx(np.exp(-2), rel=1e-14)
    with pytest.raises(DomainError):
        spectral_gap_bound(-1.0, 2)
    with pytest.raises(DomainError):
        spectral_gap_bound(1.0, 1)


def test_flat_torus_lambda1(unit_lattice, rng):
    assert flat_torus_lambda1(unit_lattice) == pytest.approx((2 * np.pi) ** 2, rel=1e-12)
    # bound holds across random small-diameter tori, tightening as D -> 0
    for _ in range(30):
        scale = rng.uniform(0.1, 1.5)
        lat = Lattice2D(np.array([scale, 0.0]),
                        np.array([rng.uniform(-0.4, 0.4) * scale, rng.uniform(0.8, 2.0) * scale]))
        lam1 = flat_torus_lambda1(lat)
        bound = spectral_gap_bound(lat.intrinsic_diameter, 2)
        assert lam1 >= bound


def test_spectral_representation_check(unit_lattice):
    x1, x2 = _grid_coords(32)
    grid = TorusConformalGrid(unit_lattice, 0.1 * np.sin(2 * np.pi * x1))
    assert grid.spectral_check() <= 1e-10
