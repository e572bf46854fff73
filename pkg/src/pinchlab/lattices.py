"""Planar lattices: reduction, injectivity radius, covering radius and
ball-counting with the calibrated count * inj bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants
from .exceptions import DomainError, HypothesisError
from .kernels import count_lattice_points


def _cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


@dataclass
class Lattice2D:
    """Rank-2 lattice given by two independent basis vectors."""

    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        self.v1 = np.asarray(self.v1, dtype=float).reshape(2)
        self.v2 = np.asarray(self.v2, dtype=float).reshape(2)
        if abs(_cross2(self.v1, self.v2)) < 1e-14:
            raise DomainError("lattice basis vectors are linearly dependent")

    @classmethod
    def square(cls, side: float) -> "Lattice2D":
        return cls(np.array([side, 0.0]), np.array([0.0, side]))

    def reduced(self) -> "Lattice2D":
        """Lagrange-Gauss reduction: |v1| = shortest vector, angle in [60, 120] deg."""
        a, b = self.v1.copy(), self.v2.copy()
        for _ in range(256):
            if np.dot(a, a) > np.dot(b, b):
                a, b = b, a
            mu = round(float(np.dot(a, b) / np.dot(a, a)))
            if mu == 0:
                break
            b = b - mu * a
        if np.dot(a, b) < 0:
            b = -b
        return Lattice2D(a, b)

    def is_reduced(self) -> bool:
        n1, n2 = np.dot(self.v1, self.v1), np.dot(self.v2, self.v2)
        return n1 <= n2 + 1e-14 and abs(np.dot(self.v1, self.v2)) <= 0.5 * n1 + 1e-14

    @property
    def covolume(self) -> float:
        return abs(_cross2(self.v1, self.v2))

    @property
    def injectivity_radius(self) -> float:
        """Half the shortest nonzero vector length."""
        red = self if self.is_reduced() else self.reduced()
        return 0.5 * float(np.linalg.norm(red.v1))

    @property
    def intrinsic_diameter(self) -> float:
        """Covering radius = max circumradius over the Delaunay triangles.

        For a reduced basis with v1 . v2 >= 0 the Delaunay triangulation of
        the fundamental parallelogram splits along the short diagonal, and
        both triangles are congruent to (0, v1, v2).
        """
        red = self if self.is_reduced() else self.reduced()
        a = float(np.linalg.norm(red.v1))
        b = float(np.linalg.norm(red.v2))
        c = float(np.linalg.norm(red.v2 - red.v1))
        area = 0.5 * red.covolume
        return a * b * c / (4.0 * area)

    def covering_radius_sampled(self, resolution: int = 160) -> float:
        """Numeric oracle for the covering radius by fundamental-domain sampling."""
        s = np.linspace(0.0, 1.0, resolution, endpoint=False)
        t1, t2 = np.meshgrid(s, s, indexing="ij")
        pts = t1[..., None] * self.v1 + t2[..., None] * self.v2
        best = np.full(pts.shape[:2], np.inf)
        for m in range(-1, 3):
            for n in range(-1, 3):
                q = m * self.v1 + n * self.v2
                best = np.minimum(best, np.linalg.norm(pts - q, axis=-1))
        return float(best.max())


def lattice_preimage_count(lat: Lattice2D, radius: float,
                           d_small: float = constants.SMALL_PART_D,
                           d_prime: float = constants.SMALL_PART_DPRIME,
                           calibrated_c: float = constants.PREIMAGE_C):
    """Exact count of lattice points in the closed ball plus the C / inj bound.

    Unreduced bases are reduced first.  Returns (count, bound, diameter_ok).
    """
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    if radius > d_small + 1e-12:
        raise HypothesisError(f"radius {radius} exceeds the small-part constant {d_small}")
    red = lat.reduced()
    count = int(count_lattice_points(red.v1[0], red.v1[1], red.v2[0], red.v2[1],
                                     red.covolume, float(radius)))
    inj = red.injectivity_radius
    bound = calibrated_c / inj
    diameter_ok = red.intrinsic_diameter >= d_prime
    return count, bound, diameter_ok


def bruteforce_count(lat: Lattice2D, radius: float, span: int = 400) -> int:
    """Independent enumeration over a fixed index box (test oracle)."""
    count = 0
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            p = m * lat.v1 + n * lat.v2
            if p[0] * p[0] + p[1] * p[1] <= radius * radius * (1 + 1e-12):
                count += 1
    return count
