"""Effective uniformization on flat tori: Gauss curvature of conformal
metrics, the mean-normalized flat reference, the Poisson recovery of the
conformal factor, and the spectral-gap bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, HypothesisError, ResolutionError
from .lattices import Lattice2D


@dataclass
class TorusConformalGrid:
    """Doubly periodic conformal factor rho on a flat torus: g = e^rho g_flat.

    rho is sampled at lattice-coordinate points (i/n1) v1 + (j/n2) v2.
    """

    lattice: Lattice2D
    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        if self.rho.ndim != 2:
            raise DomainError("conformal factor must be a 2d grid")
        if min(self.rho.shape) < 8:
            raise ResolutionError("resolution must be at least 8 per direction")

    @property
    def shape(self):
        return self.rho.shape

    def wavevectors(self):
        """Dual wavevectors 2 pi (m1 w1 + m2 w2) on the FFT index grid."""
        n1, n2 = self.rho.shape
        v1, v2 = self.lattice.v1, self.lattice.v2
        det = float(v1[0] * v2[1] - v1[1] * v2[0])
        w1 = np.array([v2[1], -v2[0]]) / det
        w2 = np.array([-v1[1], v1[0]]) / det
        m1 = np.fft.fftfreq(n1, d=1.0 / n1)
        m2 = np.fft.fftfreq(n2, d=1.0 / n2)
        kx = 2 * np.pi * (m1[:, None] * w1[0] + m2[None, :] * w2[0])
        ky = 2 * np.pi * (m1[:, None] * w1[1] + m2[None, :] * w2[1])
        return kx, ky

    def spectral_check(self) -> float:
        spec = np.fft.fft2(self.rho)
        return float(np.max(np.abs(np.fft.ifft2(spec).real - self.rho)))

    def flat_laplacian_analyst(self, field: np.ndarray) -> np.ndarray:
        """(d^2/dx^2 + d^2/dy^2) of a periodic field, spectrally."""
        kx, ky = self.wavevectors()
        spec = np.fft.fft2(field)
        return np.fft.ifft2(-(kx**2 + ky**2) * spec).real

    def cell_area(self) -> float:
        return self.lattice.covolume / (self.shape[0] * self.shape[1])

    def integrate_flat(self, field: np.ndarray) -> float:
        return float(np.sum(field)) * self.cell_area()

    def conformal_diameter_bound(self) -> float:
        """diam(T^2, e^rho g_flat) <= e^{max rho / 2} diam_flat."""
        return math.exp(0.5 * float(np.max(self.rho))) * self.lattice.intrinsic_diameter


def gauss_curvature(grid: TorusConformalGrid) -> np.ndarray:
    """K = -1/2 e^{-rho} (rho_x1x1 + rho_x2x2), spectral derivatives."""
    lap = grid.flat_laplacian_analyst(grid.rho)
    return -0.5 * np.exp(-grid.rho) * lap


def gauss_bonnet_defect(grid: TorusConformalGrid) -> float:
    """int K dvol_g on the torus; zero by Gauss-Bonnet (chi = 0)."""
    k = gauss_curvature(grid)
    return grid.integrate_flat(k * np.exp(grid.rho))


def associated_flat_metric(rho_tilde: np.ndarray, lattice: Lattice2D):
    """Constant c with int (rho_tilde + c) e^{rho_tilde} dvol_flat = 0.

    Returns (c, normalized grid); the normalization makes the flat metric the
    canonical one in the conformal class (zero mean of rho against dvol_g).
    """
    rho_tilde = np.asarray(rho_tilde, dtype=float)
    w = np.exp(rho_tilde)
    c = -float(np.sum(rho_tilde * w) / np.sum(w))
    return c, TorusConformalGrid(lattice, rho_tilde + c)


def recover_rho(k_field: np.ndarray, lattice: Lattice2D,
                damping: float = 1.0, tol: float = 1e-10,
                max_iter: int = 200, amplitude_limit: float = 1.0):
    """Solve the conformal-factor equation Delta_g rho = 2 K by Picard sweeps.

    On the flat side this reads (d_11 + d_22) rho = -2 K e^rho.  Each sweep
    solves the flat Poisson problem for the current curvature defect with the
    zero mode projected out; the zero mode itself is the conformal scaling
    direction (a constant shift of rho rescales the curvature by e^{-c}) and
    is updated by fitting the measured curvature against the target.  The
    loop stops at update norm <= tol.  Returns the grid normalized through
    associated_flat_metric (a no-op when K came from a normalized metric)
    and the sup residual of Delta_g rho - 2 K.
    """
    k_field = np.asarray(k_field, dtype=float)
    probe = TorusConformalGrid(lattice, np.zeros_like(k_field))
    kx, ky = probe.wavevectors()
    ksq = kx**2 + ky**2
    ksq[0, 0] = 1.0  # zero mode carried by the scalar c below

    def inner_sweep(c):
        """Mean-free Picard fixed point at a fixed scaling constant c."""
        rho_hat = np.zeros_like(k_field)
        for _ in range(max_iter):
            forcing = -2.0 * k_field * np.exp(rho_hat + c)
            forcing = forcing - forcing.mean()
            spec = np.fft.fft2(forcing) / (-ksq)
            spec[0, 0] = 0.0
            new = damping * np.fft.ifft2(spec).real + (1 - damping) * rho_hat
            update = float(np.max(np.abs(new - rho_hat)))
            rho_hat = new
            if np.max(np.abs(rho_hat)) + abs(c) > amplitude_limit:
                raise HypothesisError("Picard iteration left the small-amplitude regime")
            if update <= tol:
                return rho_hat
        raise HypothesisError("Picard iteration did not reach the update tolerance")

    def gauss_bonnet_mean(c):
        """Forcing-mean defect; zero exactly at the compatible scaling."""
        rho_hat = inner_sweep(c)
        return float(np.mean(k_field * np.exp(rho_hat))), rho_hat

    # secant iteration on the 1-d compatibility condition
    c0, c1 = 0.0, 0.0
    f0, rho_hat = gauss_bonnet_mean(c0)
    scale_ref = max(float(np.max(np.abs(k_field))), 1e-300)
    if abs(f0) > tol * scale_ref:
        c1 = -2.0 * f0 / scale_ref
        f1, rho_hat = gauss_bonnet_mean(c1)
        for _ in range(50):
            if abs(f1) <= tol * scale_ref or f1 == f0:
                break
            c0, c1, f0 = c1, c1 - f1 * (c1 - c0) / (f1 - f0), f1
            f1, rho_hat = gauss_bonnet_mean(c1)
        else:
            raise HypothesisError("scaling-mode secant did not converge")
        c0 = c1
    _, grid = associated_flat_metric(rho_hat + c0, lattice)
    residual_field = np.exp(-grid.rho) * (-grid.flat_laplacian_analyst(grid.rho)) - 2.0 * k_field
    return grid, float(np.max(np.abs(residual_field)))


def spectral_gap_bound(diameter: float, n: int = 2) -> float:
    """Lower bound e^{-2 (n-1) D} for the smallest positive Laplace eigenvalue
    under Ric >= -(n-1) and diameter <= D."""
    if diameter <= 0:
        raise DomainError("diameter must be positive")
    if n < 2:
        raise DomainError("dimension must be at least 2")
    return math.exp(-2.0 * (n - 1) * diameter)


def flat_torus_lambda1(lattice: Lattice2D, search: int = 6) -> float:
    """Smallest positive Laplace eigenvalue (2 pi)^2 |m1 w1 + m2 w2|^2."""
    v1, v2 = lattice.v1, lattice.v2
    det = float(v1[0] * v2[1] - v1[1] * v2[0])
    w1 = np.array([v2[1], -v2[0]]) / det
    w2 = np.array([-v1[1], v1[0]]) / det
    best = np.inf
    for m1 in range(-search, search + 1):
        for m2 in range(-search, search + 1):
            if m1 == 0 and m2 == 0:
                continue
            k = m1 * w1 + m2 * w2
            best = min(best, float(k @ k))
    return (2 * np.pi) ** 2 * best


def manufactured_recovery_error(lattice: Lattice2D, rho_star: np.ndarray):
    """Normalize rho*, compute its curvature, recover, and report the gap."""
    _, grid_star = associated_flat_metric(np.asarray(rho_star, float), lattice)
    k = gauss_curvature(grid_star)
    grid, residual = recover_rho(k, lattice)
    err = float(np.max(np.abs(grid.rho - grid_star.rho)))
    return err, residual, grid, grid_star
