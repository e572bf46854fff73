"""Uniform radial grids and finite-difference stencils.

Interior points use 4th-order central stencils; the two points at each end
fall back to 2nd-order (one-sided at the boundary itself).  Second
derivatives of curvature quantities need the 4th-order headroom to sit well
below the test tolerances.
"""

import numpy as np

from .exceptions import GridMismatchError, ResolutionError

DEFAULT_STEP = 1e-3

trapz = np.trapezoid if hasattr(np, "trapezoid") else np.trapz


def radial_grid(r_min: float, r_max: float, step: float = DEFAULT_STEP) -> np.ndarray:
    """Uniform grid from r_min to r_max inclusive (step adjusted to fit exactly)."""
    if r_max <= r_min:
        raise ValueError(f"empty radial interval [{r_min}, {r_max}]")
    n = max(int(round((r_max - r_min) / step)), 4) + 1
    return np.linspace(r_min, r_max, n)


def grid_step(r: np.ndarray) -> float:
    return float(r[1] - r[0])


def check_shared_grid(r1: np.ndarray, r2: np.ndarray) -> None:
    if r1.shape != r2.shape or not np.allclose(r1, r2, rtol=0, atol=1e-12):
        raise GridMismatchError("fields do not share a radial grid")


def deriv1(y: np.ndarray, h: float) -> np.ndarray:
    """First derivative along axis 0."""
    n = y.shape[0]
    if n < 5:
        raise ResolutionError(f"need at least 5 grid points, got {n}")
    d = np.empty_like(y, dtype=float)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    d[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h)
    d[1] = (y[2] - y[0]) / (2 * h)
    d[-2] = (y[-1] - y[-3]) / (2 * h)
    d[-1] = (3 * y[-1] - 4 * y[-2] + y[-3]) / (2 * h)
    return d


def deriv2(y: np.ndarray, h: float) -> np.ndarray:
    """Second derivative along axis 0."""
    n = y.shape[0]
    if n < 5:
        raise ResolutionError(f"need at least 5 grid points, got {n}")
    d = np.empty_like(y, dtype=float)
    d[2:-2] = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / (12 * h * h)
    d[0] = (2 * y[0] - 5 * y[1] + 4 * y[2] - y[3]) / (h * h)
    d[1] = (y[0] - 2 * y[1] + y[2]) / (h * h)
    d[-2] = (y[-3] - 2 * y[-2] + y[-1]) / (h * h)
    d[-1] = (2 * y[-1] - 5 * y[-2] + 4 * y[-3] - y[-4]) / (h * h)
    return d


def stencil_rows_deriv1(n: int, h: float):
    """Sparse representation (row, col, coeff) of the deriv1 operator matrix."""
    rows, cols, vals = [], [], []

    def put(i, j, c):
        rows.append(i)
        cols.append(j)
        vals.append(c)

    put(0, 0, -3 / (2 * h)); put(0, 1, 4 / (2 * h)); put(0, 2, -1 / (2 * h))
    put(1, 0, -1 / (2 * h)); put(1, 2, 1 / (2 * h))
    for i in range(2, n - 2):
        put(i, i - 2, 1 / (12 * h)); put(i, i - 1, -8 / (12 * h))
        put(i, i + 1, 8 / (12 * h)); put(i, i + 2, -1 / (12 * h))
    put(n - 2, n - 3, -1 / (2 * h)); put(n - 2, n - 1, 1 / (2 * h))
    put(n - 1, n - 1, 3 / (2 * h)); put(n - 1, n - 2, -4 / (2 * h)); put(n - 1, n - 3, 1 / (2 * h))
    return np.array(rows), np.array(cols), np.array(vals)


def stencil_rows_deriv2(n: int, h: float):
    """Sparse representation (row, col, coeff) of the deriv2 operator matrix."""
    rows, cols, vals = [], [], []
    h2 = h * h

    def put(i, j, c):
        rows.append(i)
        cols.append(j)
        vals.append(c)

    put(0, 0, 2 / h2); put(0, 1, -5 / h2); put(0, 2, 4 / h2); put(0, 3, -1 / h2)
    put(1, 0, 1 / h2); put(1, 1, -2 / h2); put(1, 2, 1 / h2)
    for i in range(2, n - 2):
        put(i, i - 2, -1 / (12 * h2)); put(i, i - 1, 16 / (12 * h2)); put(i, i, -30 / (12 * h2))
        put(i, i + 1, 16 / (12 * h2)); put(i, i + 2, -1 / (12 * h2))
    put(n - 2, n - 3, 1 / h2); put(n - 2, n - 2, -2 / h2); put(n - 2, n - 1, 1 / h2)
    put(n - 1, n - 1, 2 / h2); put(n - 1, n - 2, -5 / h2); put(n - 1, n - 3, 4 / h2); put(n - 1, n - 4, -1 / h2)
    return np.array(rows), np.array(cols), np.array(vals)


def trapezoid(y: np.ndarray, h: float) -> float:
    return float(trapz(y, dx=h))


def simpson(y: np.ndarray, h: float) -> float:
    from scipy.integrate import simpson as _simpson

    return float(_simpson(y, dx=h))
