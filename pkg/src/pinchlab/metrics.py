"""Rotationally symmetric 3-metrics and radial symmetric 2-tensors.

A warped metric is dr^2 + a(r)^2 dx1^2 + b(r)^2 dx2^2 in coordinates
(x1, x2, r); index 2 (the third slot) is the radial direction throughout,
matching the component naming h33, h13, h23, h11, h12, h22.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, GridMismatchError, ResolutionError
from .grids import check_shared_grid, grid_step

R_AXIS = 2  # coordinate index of the radial direction

# (row, col) pairs of the six independent components, in naming order
COMPONENT_INDEX = {
    "h33": (2, 2),
    "h13": (0, 2),
    "h23": (1, 2),
    "h11": (0, 0),
    "h12": (0, 1),
    "h22": (1, 1),
}


@dataclass
class WarpedMetric:
    """Sampled warp profiles a, b with analytic (or consistent) derivatives."""

    r: np.ndarray
    a: np.ndarray
    da: np.ndarray
    d2a: np.ndarray
    b: np.ndarray
    db: np.ndarray
    d2b: np.ndarray
    kind: str = "tube"  # tube | cusp | interpolated | deformed | flat
    boundary_inj: float | None = None
    boundary_diam: float | None = None
    boundary_area: float | None = None

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        if self.r.size < 5:
            raise ResolutionError("metric grid needs at least 5 points")
        for name in ("a", "da", "d2a", "b", "db", "d2b"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.r.shape:
                raise GridMismatchError(f"profile {name} not on the metric grid")
            setattr(self, name, arr)
        if np.any(self.a[1:] <= 0) or np.any(self.b[1:] <= 0):
            raise DomainError("warp profiles must be positive on (r_min, r_max]")
        if self.kind == "tube" and self.r[0] < 0.1 - 1e-12:
            raise DomainError("tube metrics require r_min >= 0.1 (sinh degenerates at 0)")

    @property
    def step(self) -> float:
        return grid_step(self.r)

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def coordinate_matrix(self) -> np.ndarray:
        """g_{mu nu}(r) as an (N, 3, 3) array, coordinate order (x1, x2, r)."""
        n = self.r.size
        g = np.zeros((n, 3, 3))
        g[:, 0, 0] = self.a**2
        g[:, 1, 1] = self.b**2
        g[:, 2, 2] = 1.0
        return g

    def coordinate_matrix_deriv(self) -> np.ndarray:
        n = self.r.size
        dg = np.zeros((n, 3, 3))
        dg[:, 0, 0] = 2 * self.a * self.da
        dg[:, 1, 1] = 2 * self.b * self.db
        return dg

    def frame_weights(self) -> np.ndarray:
        """Per-point diagonal weights (a, b, 1) mapping coordinates to frame."""
        return np.stack([self.a, self.b, np.ones_like(self.a)], axis=1)

    def derivative_consistency(self) -> float:
        """Max relative mismatch between stored derivatives and central differences."""
        h = self.step
        worst = 0.0
        for vals, dstored in ((self.a, self.da), (self.b, self.db), (self.da, self.d2a), (self.db, self.d2b)):
            fd = (vals[2:] - vals[:-2]) / (2 * h)
            scale = np.maximum(np.abs(dstored[1:-1]), np.maximum(np.abs(vals[1:-1]), 1e-12))
            worst = max(worst, float(np.max(np.abs(fd - dstored[1:-1]) / scale)))
        return worst

    def check_invariants(self) -> None:
        tol = 10 * self.step**2
        mism = self.derivative_consistency()
        if mism > tol:
            raise DomainError(f"stored derivatives disagree with finite differences: {mism:.3e} > {tol:.3e}")

    def perturbed(self, h: "SymRadialTensor", scale: float = 1.0) -> np.ndarray:
        """Coordinate matrix of g + scale*h (general radial metric, not warped form)."""
        return self.coordinate_matrix() + scale * h.comps


def warped_from_callables(r, fa, dfa, d2fa, fb, dfb, d2fb, kind="tube", **extra) -> WarpedMetric:
    r = np.asarray(r, dtype=float)
    return WarpedMetric(r, fa(r), dfa(r), d2fa(r), fb(r), dfb(r), d2fb(r), kind=kind, **extra)


@dataclass
class SymRadialTensor:
    """Symmetric (0,2)-tensor field depending only on r, coordinate components.

    Optional d_comps/d2_comps hold analytic radial derivatives; operators fall
    back to finite differences when they are absent.
    """

    r: np.ndarray
    comps: np.ndarray  # (N, 3, 3), symmetric per point
    d_comps: np.ndarray | None = None
    d2_comps: np.ndarray | None = None

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.comps = np.asarray(self.comps, dtype=float)
        if self.comps.shape != (self.r.size, 3, 3):
            raise GridMismatchError("component array must have shape (N, 3, 3)")
        if not np.allclose(self.comps, np.swapaxes(self.comps, 1, 2), atol=1e-12):
            raise ValueError("tensor components must be symmetric")
        self.comps = 0.5 * (self.comps + np.swapaxes(self.comps, 1, 2))
        for name in ("d_comps", "d2_comps"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != self.comps.shape:
                    raise GridMismatchError(f"{name} must match the component shape")
                setattr(self, name, 0.5 * (arr + np.swapaxes(arr, 1, 2)))

    @classmethod
    def from_components(cls, r, h33=None, h13=None, h23=None, h11=None, h12=None, h22=None,
                        derivs=None, derivs2=None):
        """Build from named component arrays; derivs/derivs2 are name->array dicts."""
        r = np.asarray(r, dtype=float)

        def assemble(named):
            if named is None:
                return None
            out = np.zeros((r.size, 3, 3))
            for name, arr in named.items():
                i, j = COMPONENT_INDEX[name]
                out[:, i, j] = arr
                out[:, j, i] = arr
            return out

        comps = assemble({k: v for k, v in (("h33", h33), ("h13", h13), ("h23", h23),
                                            ("h11", h11), ("h12", h12), ("h22", h22))
                          if v is not None}) if any(
            v is not None for v in (h33, h13, h23, h11, h12, h22)) else np.zeros((r.size, 3, 3))
        return cls(r, comps, assemble(derivs), assemble(derivs2))

    @classmethod
    def zeros(cls, r):
        r = np.asarray(r, dtype=float)
        z = np.zeros((r.size, 3, 3))
        return cls(r, z, z.copy(), z.copy())

    def component(self, name: str) -> np.ndarray:
        i, j = COMPONENT_INDEX[name]
        return self.comps[:, i, j]

    def frame_components(self, metric: WarpedMetric) -> np.ndarray:
        """Components in the orthonormal frame (a^-1 dx1, b^-1 dx2, dr)."""
        check_shared_grid(self.r, metric.r)
        w = metric.frame_weights()  # (N, 3)
        return self.comps / (w[:, :, None] * w[:, None, :])

    def frame_norm(self, metric: WarpedMetric) -> np.ndarray:
        """Pointwise |h| with the metric's frame weights."""
        f = self.frame_components(metric)
        return np.sqrt(np.sum(f * f, axis=(1, 2)))

    def trace(self, metric: WarpedMetric) -> np.ndarray:
        """tr_g h = g^{mu nu} h_{mu nu}."""
        check_shared_grid(self.r, metric.r)
        return (self.comps[:, 0, 0] / metric.a**2
                + self.comps[:, 1, 1] / metric.b**2
                + self.comps[:, 2, 2])

    def _combine(self, other, sign):
        check_shared_grid(self.r, other.r)
        d = d2 = None
        if self.d_comps is not None and other.d_comps is not None:
            d = self.d_comps + sign * other.d_comps
        if self.d2_comps is not None and other.d2_comps is not None:
            d2 = self.d2_comps + sign * other.d2_comps
        return SymRadialTensor(self.r, self.comps + sign * other.comps, d, d2)

    def __add__(self, other: "SymRadialTensor") -> "SymRadialTensor":
        return self._combine(other, 1.0)

    def __sub__(self, other: "SymRadialTensor") -> "SymRadialTensor":
        return self._combine(other, -1.0)

    def __mul__(self, c: float) -> "SymRadialTensor":
        return SymRadialTensor(self.r, c * self.comps,
                               None if self.d_comps is None else c * self.d_comps,
                               None if self.d2_comps is None else c * self.d2_comps)

    __rmul__ = __mul__


@dataclass
class CurvatureData:
    """Sectional curvatures, frame Ricci, scalar and |Rm - Rm^kappa| on a grid."""

    r: np.ndarray
    sec_r1: np.ndarray  # plane (r, x1): -a''/a
    sec_r2: np.ndarray  # plane (r, x2): -b''/b
    sec_12: np.ndarray  # plane (x1, x2): -a'b'/(ab)
    ricci: np.ndarray  # (N, 3, 3) frame components
    scalar: np.ndarray
    kappa: float
    dev_kappa: np.ndarray  # |Rm - Rm^kappa| pointwise

    def sup_sec_deviation(self, kappa: float | None = None) -> float:
        k = self.kappa if kappa is None else kappa
        return float(max(np.max(np.abs(self.sec_r1 - k)),
                         np.max(np.abs(self.sec_r2 - k)),
                         np.max(np.abs(self.sec_12 - k))))


def curvature_of_warped(metric: WarpedMetric, kappa: float = -1.0) -> CurvatureData:
    """Curvature of dr^2 + a^2 dx1^2 + b^2 dx2^2 from the closed warped-product forms."""
    if metric.r.size < 5:
        raise ResolutionError("curvature needs at least 5 grid points")
    if np.any(metric.a <= 0) or np.any(metric.b <= 0):
        raise DomainError("warp profiles must be positive")
    a, da, d2a = metric.a, metric.da, metric.d2a
    b, db, d2b = metric.b, metric.db, metric.d2b
    sec_r1 = -d2a / a
    sec_r2 = -d2b / b
    sec_12 = -(da * db) / (a * b)
    n = metric.r.size
    ricci = np.zeros((n, 3, 3))
    ricci[:, 0, 0] = sec_r1 + sec_12
    ricci[:, 1, 1] = sec_r2 + sec_12
    ricci[:, 2, 2] = sec_r1 + sec_r2
    scalar = 2 * (sec_r1 + sec_r2 + sec_12)
    dev = riemann_deviation_from_sectional(sec_r1, sec_r2, sec_12, kappa)
    return CurvatureData(metric.r, sec_r1, sec_r2, sec_12, ricci, scalar, kappa, dev)


def riemann_deviation_from_sectional(sec_r1, sec_r2, sec_12, kappa) -> np.ndarray:
    """|Rm - Rm^kappa| in frame components for a diagonal curvature operator.

    Each principal plane contributes 4 equal-magnitude entries to the
    (0,4)-tensor, hence the factor 2 under the square root.
    """
    return 2.0 * np.sqrt((sec_r1 - kappa) ** 2 + (sec_r2 - kappa) ** 2 + (sec_12 - kappa) ** 2)


def curvature_deviation(data: CurvatureData, kappa: float) -> float:
    """sup over the grid of |Rm - Rm^kappa|."""
    dev = riemann_deviation_from_sectional(data.sec_r1, data.sec_r2, data.sec_12, kappa)
    return float(np.max(dev))


def metric_as_tensor(metric: WarpedMetric) -> SymRadialTensor:
    n = metric.r.size
    d2g = np.zeros((n, 3, 3))
    d2g[:, 0, 0] = 2 * (metric.da**2 + metric.a * metric.d2a)
    d2g[:, 1, 1] = 2 * (metric.db**2 + metric.b * metric.d2b)
    return SymRadialTensor(metric.r, metric.coordinate_matrix(),
                           metric.coordinate_matrix_deriv(), d2g)


# ---------------------------------------------------------------------------
# CSV import/export of warp profiles and JSON-ready curvature records


PROFILE_COLUMNS = ("r", "a", "da", "d2a", "b", "db", "d2b")


def profiles_to_csv(metric: WarpedMetric) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PROFILE_COLUMNS)
    for k in range(metric.r.size):
        writer.writerow([repr(float(v)) for v in
                         (metric.r[k], metric.a[k], metric.da[k], metric.d2a[k],
                          metric.b[k], metric.db[k], metric.d2b[k])])
    return buf.getvalue()


def profiles_from_csv(text: str, kind: str = "tube", **extra) -> WarpedMetric:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != PROFILE_COLUMNS:
        raise ValueError(f"expected profile columns {PROFILE_COLUMNS}, got {tuple(header)}")
    rows = np.array([[float(v) for v in row] for row in reader if row])
    return WarpedMetric(rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3],
                        rows[:, 4], rows[:, 5], rows[:, 6], kind=kind, **extra)


def curvature_records(data: CurvatureData, stride: int = 1) -> list[dict]:
    """Curvature report rows keyed by radius."""
    recs = []
    for k in range(0, data.r.size, stride):
        recs.append({
            "r": float(data.r[k]),
            "sec_r1": float(data.sec_r1[k]),
            "sec_r2": float(data.sec_r2[k]),
            "sec_12": float(data.sec_12[k]),
            "scalar": float(data.scalar[k]),
            "dev_kappa": float(data.dev_kappa[k]),
        })
    return recs
