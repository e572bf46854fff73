"""Constructors for the explicit model metrics: hyperbolic tubes and cusps,
drilling/filling interpolations, the deformed counterexample family, and the
tube-geometry and sparsity-sum estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .exceptions import DomainError, HypothesisError
from .grids import DEFAULT_STEP, radial_grid, trapz
from .lattices import Lattice2D
from .metrics import CurvatureData, WarpedMetric, curvature_of_warped


# ---------------------------------------------------------------------------
# smooth profiles


def _smootherstep(x):
    """Smoothstep composed with itself: C^3 across the junctions.

    Near a junction the transition vanishes to fourth order, so second
    derivatives of glued profiles stay finite-difference consistent.
    """
    x = np.clip(x, 0.0, 1.0)
    s = x * x * (3.0 - 2.0 * x)
    return s * s * (3.0 - 2.0 * s)


def _smootherstep_d1(x):
    inside = (x > 0) & (x < 1)
    x = np.clip(x, 0.0, 1.0)
    s = x * x * (3.0 - 2.0 * x)
    ds = 6.0 * x * (1.0 - x)
    return np.where(inside, 6.0 * s * (1.0 - s) * ds, 0.0)


def _smootherstep_d2(x):
    inside = (x > 0) & (x < 1)
    x = np.clip(x, 0.0, 1.0)
    s = x * x * (3.0 - 2.0 * x)
    ds = 6.0 * x * (1.0 - x)
    d2s = 6.0 - 12.0 * x
    return np.where(inside, 6.0 * ((1.0 - 2.0 * s) * ds * ds + s * (1.0 - s) * d2s), 0.0)


def _smootherstep_int(x):
    """Antiderivative of the composed step with value 0 at x=0 (on [0,1])."""
    x = np.clip(x, 0.0, 1.0)
    return (x**5 * (27.0 / 5.0 + x * (-6.0 + x * (-6.0 + x * (13.5 + x * (-8.0 + 1.6 * x))))))


# measured suprema of the default cutoff (reported, not asserted)
CUTOFF_SUP_D1 = 2.25
CUTOFF_SUP_D2 = 7.8822


@dataclass
class CutoffProfile:
    """Smooth sigma: 1 on (-inf,-1], 0 on [0,infty), monotone non-increasing.

    Default is smoothstep composed with itself (C^3), with measured
    |sigma'| <= 2.25 and |sigma''| <= 7.8822.
    """

    sup_d1: float = CUTOFF_SUP_D1
    sup_d2: float = CUTOFF_SUP_D2

    def __call__(self, t):
        return 1.0 - _smootherstep(np.asarray(t, dtype=float) + 1.0)

    def d1(self, t):
        return -_smootherstep_d1(np.asarray(t, dtype=float) + 1.0)

    def d2(self, t):
        return -_smootherstep_d2(np.asarray(t, dtype=float) + 1.0)

    def check_invariants(self, samples: int = 4001):
        t = np.linspace(-1.5, 0.5, samples)
        v = self(t)
        assert np.all(np.diff(v) <= 1e-14), "cutoff must be monotone non-increasing"
        assert v.min() >= 0.0 and v.max() <= 1.0
        assert abs(float(self(np.array(-1.0)))) - 1.0 <= 1e-15 and abs(float(self(np.array(0.0)))) <= 1e-15
        assert np.max(np.abs(self.d1(t))) <= self.sup_d1 + 1e-12
        assert np.max(np.abs(self.d2(t))) <= self.sup_d2 + 1e-12


@dataclass
class BumpProfile:
    """Mollified plateau f: [0,inf) -> [0, delta] with unit-slope-safe ramps.

    Properties: support in [0, R/delta + 4], |f| <= delta, |f'| <= delta,
    |f''| <= 1, integral exactly R (plateau length R/delta - ramp width).
    """

    delta: float
    big_r: float
    ramp: float = 2.5

    def __post_init__(self):
        if self.delta <= 0 or self.big_r <= 0:
            raise DomainError("bump profile needs delta > 0 and R > 0")
        self.plateau = self.big_r / self.delta - self.ramp
        if self.plateau < 0:
            raise DomainError("delta too large: plateau length would be negative")
        if self.delta * CUTOFF_SUP_D2 / self.ramp**2 > 1.0:
            raise DomainError("delta too large for the |f''| <= 1 bound")
        self.support = 2 * self.ramp + self.plateau  # <= R/delta + 4

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        w, L, d = self.ramp, self.plateau, self.delta
        up = d * _smootherstep(s / w)
        down = d * _smootherstep((2 * w + L - s) / w)
        return np.where(s < w, up, np.where(s <= w + L, d, np.where(s <= 2 * w + L, down, 0.0))) * (s >= 0)

    def d1(self, s):
        s = np.asarray(s, dtype=float)
        w, L, d = self.ramp, self.plateau, self.delta
        up = d / w * _smootherstep_d1(s / w)
        down = -d / w * _smootherstep_d1((2 * w + L - s) / w)
        return np.where(s < w, up, np.where(s <= w + L, 0.0, np.where(s <= 2 * w + L, down, 0.0))) * (s >= 0)

    def d2(self, s):
        s = np.asarray(s, dtype=float)
        w, L, d = self.ramp, self.plateau, self.delta
        up = d / w**2 * _smootherstep_d2(s / w)
        down = d / w**2 * _smootherstep_d2((2 * w + L - s) / w)
        return np.where(s < w, up, np.where(s <= w + L, 0.0, np.where(s <= 2 * w + L, down, 0.0))) * (s >= 0)

    def integral_to(self, s):
        """F(s) = int_0^s f, exact piecewise-polynomial antiderivative."""
        s = np.asarray(s, dtype=float)
        w, L, d = self.ramp, self.plateau, self.delta
        up = d * w * _smootherstep_int(s / w)
        mid = d * w / 2 + d * (np.minimum(s, w + L) - w)
        down = self.big_r - d * w * _smootherstep_int((2 * w + L - s) / w)
        out = np.where(s < w, up, np.where(s <= w + L, mid, np.where(s <= 2 * w + L, down, self.big_r)))
        return np.where(s <= 0, 0.0, out)

    def check_invariants(self):
        s = np.linspace(-1.0, self.support + 1.0, 20001)
        v = self(s)
        assert np.all(v >= 0) and np.max(v) <= self.delta + 1e-15
        assert np.max(np.abs(self.d1(s))) <= self.delta + 1e-12
        assert np.max(np.abs(self.d2(s))) <= 1.0 + 1e-12
        assert np.all(v[s > self.support] == 0) and np.all(v[s < 0] == 0)
        quad = trapz(v, s)
        assert abs(quad - self.big_r) <= 1e-6 * self.big_r, f"integral {quad} != {self.big_r}"


@dataclass
class TubeGeometry:
    """Closed-form geometry of a Margulis tube of core length l and radius R."""

    core_length: float
    radius: float
    meridian_length: float = field(init=False)
    boundary_area: float = field(init=False)

    def __post_init__(self):
        if self.core_length <= 0 or self.radius <= 0:
            raise DomainError("tube geometry needs positive core length and radius")
        self.meridian_length = 2 * math.pi * math.sinh(self.radius)
        self.boundary_area = 2 * math.pi * self.core_length * math.sinh(self.radius) * math.cosh(self.radius)

    def margulis_compatible(self, mu: float = constants.MARGULIS_MU) -> bool:
        """l cosh(R) <= 2 mu, the shortest-crossing-curve constraint."""
        return self.core_length * math.cosh(self.radius) <= 2 * mu


# ---------------------------------------------------------------------------
# metric constructors


def hyperbolic_tube(core_length: float, radius: float, r_min: float = 0.1,
                    step: float = DEFAULT_STEP):
    """dr^2 + sinh^2(r) dx1^2 + cosh^2(r) dx2^2 on [r_min, radius]."""
    if core_length <= 0 or radius <= 0:
        raise DomainError("tube parameters must be positive")
    r = radial_grid(r_min, radius, step)
    metric = WarpedMetric(r, np.sinh(r), np.cosh(r), np.sinh(r),
                          np.cosh(r), np.sinh(r), np.cosh(r), kind="tube")
    return metric, TubeGeometry(core_length, radius)


def cusp_metric(r_min: float = -10.0, r_max: float = 10.0, step: float = DEFAULT_STEP) -> WarpedMetric:
    """e^{-2r} g_flat + dr^2 (both warps e^{-r})."""
    r = radial_grid(r_min, r_max, step)
    e = np.exp(-r)
    return WarpedMetric(r, e, -e, e, e, -e, e, kind="cusp")


def flat_product(r_min: float = 0.0, r_max: float = 5.0, step: float = DEFAULT_STEP) -> WarpedMetric:
    r = radial_grid(r_min, r_max, step)
    z = np.zeros_like(r)
    return WarpedMetric(r, np.ones_like(r), z, z, np.ones_like(r), z, z, kind="flat")


def exp_warp_metric(c: float = 0.5, sign: float = 1.0, r_min: float = 0.0, r_max: float = 5.0,
                    step: float = DEFAULT_STEP) -> WarpedMetric:
    """a = b = c e^{sign r}; hyperbolic for any c > 0."""
    r = radial_grid(r_min, r_max, step)
    a = c * np.exp(sign * r)
    return WarpedMetric(r, a, sign * a, a, a, sign * a, a, kind="cusp" if sign < 0 else "interpolated")


def drilling_interpolation(radius_hat: float, sigma: CutoffProfile | None = None,
                           r_min: float = 0.1, pad: float = 2.0,
                           step: float = DEFAULT_STEP) -> WarpedMetric:
    """Tube metric for r >= R_hat blended into the cusp form e^r/2 for r <= R_hat - 1.

    Warp profiles (1-sigma) sinh + sigma e^r/2 and likewise with cosh; since
    e^r/2 - sinh r = e^{-r}/2, the blend perturbs the tube by O(e^{-R_hat}).
    """
    if radius_hat < 3:
        raise DomainError("drilling interpolation needs R_hat >= 3")
    sigma = sigma or CutoffProfile()
    r = radial_grid(r_min, radius_hat + pad, step)
    s, ds, d2s = sigma(r - radius_hat), sigma.d1(r - radius_hat), sigma.d2(r - radius_hat)
    em = np.exp(-r) / 2
    a = np.sinh(r) + s * em
    da = np.cosh(r) + ds * em - s * em
    d2a = np.sinh(r) + d2s * em - 2 * ds * em + s * em
    b = np.cosh(r) - s * em
    db = np.sinh(r) - ds * em + s * em
    d2b = np.cosh(r) - d2s * em + 2 * ds * em - s * em
    return WarpedMetric(r, a, da, d2a, b, db, d2b, kind="interpolated")


def filling_interpolation(radius: float, sigma: CutoffProfile | None = None,
                          t_min: float = -3.0, t_max: float = 3.0,
                          step: float = DEFAULT_STEP) -> WarpedMetric:
    """Cusp form e^{R-t}/2 for t >= 0 blended into sinh/cosh(R-t) for t <= -1.

    The correction sigma(t) e^{t-R}/2 subtracted from (added to) the two warp
    profiles produces exactly sinh(R-t) and cosh(R-t) once sigma = 1.
    """
    if radius < 3:
        raise DomainError("filling interpolation needs R >= 3")
    sigma = sigma or CutoffProfile()
    t = radial_grid(t_min, t_max, step)
    s, ds, d2s = sigma(t), sigma.d1(t), sigma.d2(t)
    big = np.exp(radius - t) / 2
    small = np.exp(t - radius) / 2
    a = big - s * small
    da = -big - ds * small - s * small
    d2a = big - d2s * small - 2 * ds * small - s * small
    b = big + s * small
    db = -big + ds * small + s * small
    d2b = big + d2s * small + 2 * ds * small + s * small
    return WarpedMetric(t, a, da, d2a, b, db, d2b, kind="interpolated")


def delta_for_pinching(eps: float) -> float:
    """Deformation size delta guaranteeing sup|sec+1| <= eps for the family below."""
    return eps / 3.5


def counterexample_metric(delta: float, big_r: float, m: float,
                          boundary: Lattice2D | None = None,
                          pad: float = 2.0, step: float = DEFAULT_STEP):
    """Deformed cusp-type metric stretching the x2-circle by e^{int f} past depth m.

    Returns (metric, bump, warning) where warning flags delta outside the
    calibrated pinching range for eps = 3.5 delta.
    """
    if m <= 0:
        raise DomainError("deformation depth m must be positive")
    bump = BumpProfile(delta, big_r)
    t = radial_grid(0.0, m + bump.support + pad, step)
    f = bump(t - m)
    df = bump.d1(t - m)
    big_f = bump.integral_to(t - m)
    a = np.exp(-t)
    b = np.exp(-t + big_f)
    db = (-1.0 + f) * b
    d2b = ((-1.0 + f) ** 2 + df) * b
    boundary = boundary or Lattice2D.square(2 * constants.MARGULIS_MU)
    metric = WarpedMetric(t, a, -a, a, b, db, d2b, kind="deformed",
                          boundary_inj=boundary.injectivity_radius,
                          boundary_diam=boundary.intrinsic_diameter,
                          boundary_area=boundary.covolume)
    warning = delta > delta_for_pinching(constants.COUNTEREXAMPLE_EPS_MAX)
    return metric, bump, warning


# ---------------------------------------------------------------------------
# quantitative estimates on model metrics


def futer_radius_bound(core_length: float, eps: float):
    """Tube-radius lower bound arcosh(eps / sqrt(8 l)); (0, vacuous) if the
    argument drops below 1."""
    if not (0 < eps <= 0.3):
        raise HypothesisError("requires 0 < eps <= 0.3")
    if core_length <= 0:
        raise DomainError("core length must be positive")
    if core_length >= 8 * eps**2:
        raise HypothesisError("requires core length < 8 eps^2")
    arg = eps / math.sqrt(8 * core_length)
    if arg < 1:
        return 0.0, True
    return math.acosh(arg), False


def weighted_ricci_deficit(metric: WarpedMetric, lam: float,
                           calibrated_c: float = constants.WEIGHTED_DEFICIT_C,
                           deficit_start: float | None = None):
    """Quadrature of int inj^{-(2-lambda)} |Ric + 2g|^2 dvol and its bound.

    Uses the comparison model inj(t) = inj(boundary) e^{-t}; the bound is
    c D0^2 eps^2 int_m^inf e^{-lambda t / 2} dt with the measured pinching eps.
    """
    if not (0 < lam < 2):
        raise HypothesisError("lambda must lie in (0, 2)")
    if metric.boundary_inj is None or metric.boundary_diam is None or metric.boundary_area is None:
        raise DomainError("metric carries no boundary lattice data")
    curv = curvature_of_warped(metric)
    eps = curv.sup_sec_deviation(-1.0)
    ric_deficit_sq = ((curv.ricci[:, 0, 0] + 2) ** 2 + (curv.ricci[:, 1, 1] + 2) ** 2
                      + (curv.ricci[:, 2, 2] + 2) ** 2)
    inj = metric.boundary_inj * np.exp(-metric.r)
    dvol = metric.a * metric.b * metric.boundary_area
    integrand = inj ** (-(2 - lam)) * ric_deficit_sq * dvol
    value = float(trapz(integrand, metric.r))
    if deficit_start is None:
        nz = np.nonzero(ric_deficit_sq > 1e-30)[0]
        deficit_start = float(metric.r[nz[0]]) if nz.size else float(metric.r[-1])
    bound = calibrated_c * metric.boundary_diam**2 * eps**2 * (2 / lam) * math.exp(-lam * deficit_start / 2)
    return value, bound, eps


def sparsity_sum(distances, delta: float, kappa_prime: float, m: float):
    """sum_i e^{-(2-delta) ceil(d_i)} against m (2-d-k')^{-1} e^{-(2-d-k')(r0-1)}.

    The distance multiset must satisfy the growth condition
    #{i : d_i <= r} <= m e^{kappa' r}; violations raise with the offending r.
    """
    distances = np.sort(np.asarray(distances, dtype=float))
    if delta + kappa_prime >= 2:
        raise HypothesisError("requires delta + kappa' < 2")
    if distances.size == 0:
        return 0.0, 0.0
    if np.any(distances <= 0):
        raise DomainError("tube distances must be positive")
    counts = np.arange(1, distances.size + 1)
    allowed = m * np.exp(kappa_prime * distances)
    bad = counts > allowed * (1 + 1e-12)
    if np.any(bad):
        r_bad = distances[bad][0]
        raise HypothesisError(f"growth condition fails at r = {r_bad:.6g}: "
                              f"{int(counts[bad][0])} > {allowed[bad][0]:.6g}")
    ceil_d = np.ceil(distances)
    total = float(np.sum(np.exp(-(2 - delta) * ceil_d)))
    rate = 2 - delta - kappa_prime
    r0 = float(np.min(ceil_d))
    bound = m / rate * math.exp(-rate * (r0 - 1))
    return total, bound


def pinching_of(metric: WarpedMetric, kappa: float = -1.0) -> float:
    return curvature_of_warped(metric, kappa).sup_sec_deviation(kappa)


def pinching_sweep(build, radii, kappa: float = -1.0):
    """sup|sec - kappa| for a family of metrics plus the fitted log-slope."""
    sups = np.array([pinching_of(build(rr), kappa) for rr in radii])
    slope, intercept = np.polyfit(np.asarray(radii, float), np.log(sups), 1)
    return sups, float(slope), float(math.exp(intercept))
