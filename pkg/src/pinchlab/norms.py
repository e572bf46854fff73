"""Hybrid, exponential and decomposition norms for radial tensor fields.

Sup-type components are grid maxima of frame norms (a two-scale difference
quotient stands in for Holder seminorms and is reported, never asserted);
the weighted-L2 components are basepoint-indexed integrals with radial
distance |r - r_x| and volume element a b dr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cusp import TrivialEinsteinVariation, canonical_variation
from .exceptions import DomainError
from .grids import check_shared_grid
from .metrics import SymRadialTensor, WarpedMetric
from .operators import (connection_laplacian, covariant_derivatives,
                        frame_norm_3form, frame_norm_4form, frame_norm_general,
                        structure_of_warped, tensor_derivatives)


@dataclass
class NormConfig:
    n: int = 3
    delta: float = 0.5
    r0: float = 1.0
    eps_bar: float = 0.05
    lam: float = 0.5
    b: float = 1.5
    eta: float = 2.5

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("dimension must be at least 3")
        if not (0 < self.delta < 2 * math.sqrt(self.n - 2)):
            raise DomainError("delta out of range (0, 2 sqrt(n-2))")
        if self.r0 < 1:
            raise DomainError("r0 must be at least 1")
        if self.eps_bar <= 0:
            raise DomainError("eps_bar must be positive")
        if not (0 < self.lam < 1):
            raise DomainError("lambda must lie in (0, 1)")
        if self.b <= 1:
            raise DomainError("b must exceed 1")
        if self.eta < 2 + self.lam:
            raise DomainError("eta must be at least 2 + lambda")

    @property
    def weight_rate(self) -> float:
        """Exponent 2 sqrt(n-2) - delta of the basepoint weights."""
        return 2 * math.sqrt(self.n - 2) - self.delta


@dataclass
class NormReport:
    sup_c0: float
    sup_c1: float
    sup_c2: float
    holder_quotients: dict
    weighted_l2_h2: np.ndarray   # per-basepoint sqrt of the full weighted integral
    weighted_l2_h0: np.ndarray
    in_set_e: np.ndarray
    hybrid_2: float
    hybrid_0: float
    exp_c0: float = float("nan")
    exp_flagged: bool = False
    decomposition_value: float = float("nan")
    variation: TrivialEinsteinVariation | None = None


def _cumulative(f, h):
    """Cumulative integral, trapezoid plus Euler-Maclaurin correction."""
    from .grids import deriv1

    out = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * h)))
    df = deriv1(f, h)
    return out - h * h / 12.0 * (df - df[0])


def _weighted_all_basepoints(r, integrand, vol, rate):
    """I(x_k) = int e^{-rate |r - r_k|} q(r) vol(r) dr for every basepoint.

    Split at the basepoint; both halves are cumulative prefix sums.
    """
    h = r[1] - r[0]
    cum_left = _cumulative(np.exp(rate * r) * integrand * vol, h)
    cum_right_total = _cumulative(np.exp(-rate * r) * integrand * vol, h)
    tail_right = cum_right_total[-1] - cum_right_total
    return np.exp(-rate * r) * cum_left + np.exp(rate * r) * tail_right


def set_e_membership(metric: WarpedMetric, cfg: NormConfig) -> np.ndarray:
    """Annulus volume test deciding membership in the set of heavy basepoints.

    x is in E iff int_{r0 <= |r - r_x| <= 2 r0} e^{-rate |r - r_x|} dvol <= eps_bar.
    """
    r = metric.r
    h = metric.step
    rate = cfg.weight_rate
    vol = metric.a * metric.b
    cum_left = _cumulative(np.exp(rate * r) * vol, h)
    cum_right = _cumulative(np.exp(-rate * r) * vol, h)

    def seg_left(lo, hi):  # int over [lo, hi] of e^{rate r} vol
        return np.interp(hi, r, cum_left) - np.interp(lo, r, cum_left)

    def seg_right(lo, hi):
        return np.interp(hi, r, cum_right) - np.interp(lo, r, cum_right)

    lo1 = np.clip(r - 2 * cfg.r0, r[0], r[-1])
    hi1 = np.clip(r - cfg.r0, r[0], r[-1])
    lo2 = np.clip(r + cfg.r0, r[0], r[-1])
    hi2 = np.clip(r + 2 * cfg.r0, r[0], r[-1])
    ann = (np.exp(-rate * r) * seg_left(lo1, hi1)
           + np.exp(rate * r) * seg_right(lo2, hi2))
    return ann <= cfg.eps_bar


def small_part_depth(metric: WarpedMetric) -> np.ndarray:
    """Distance-into-the-small-part coordinate r(x) used by the weights."""
    if metric.kind in ("cusp", "deformed"):
        return metric.r - metric.r[0]
    if metric.kind in ("tube", "interpolated"):
        return metric.r[-1] - metric.r
    return np.zeros_like(metric.r)


def inverse_weight(metric: WarpedMetric, lam: float) -> np.ndarray:
    """W_lambda: e^{-lam r} in cusps, e^{-lam r} + e^{lam (r - R)} in tubes, 1 flat."""
    depth = small_part_depth(metric)
    if metric.kind in ("cusp", "deformed"):
        return np.exp(-lam * depth)
    if metric.kind in ("tube", "interpolated"):
        big_r = float(metric.r[-1] - metric.r[0])
        return np.exp(-lam * depth) + np.exp(lam * (depth - big_r))
    return np.ones_like(metric.r)


def exponential_c0(h: SymRadialTensor, metric: WarpedMetric, lam: float) -> float:
    w = inverse_weight(metric, lam)
    return float(np.max(h.frame_norm(metric) / w))


def hybrid_norms(h: SymRadialTensor, metric: WarpedMetric, cfg: NormConfig) -> NormReport:
    """Sup-type and basepoint-weighted L2 components plus their maxima."""
    check_shared_grid(h.r, metric.r)
    struct = structure_of_warped(metric)
    dh, d2h = tensor_derivatives(h, metric.step)
    nab1, nab2 = covariant_derivatives(struct, h.comps, dh, d2h)
    lap = connection_laplacian(struct, h.comps, dh, d2h)

    n0 = frame_norm_general(struct, h.comps)
    n1 = frame_norm_3form(struct, nab1)
    n2 = frame_norm_4form(struct, nab2)
    nlap = frame_norm_general(struct, lap)

    sup_c0 = float(np.max(n0))
    sup_c1 = float(np.max(n0 + n1))
    sup_c2 = float(np.max(n0 + n1 + n2))

    quotients = {}
    for scale_steps in (1, 10):
        if h.r.size > scale_steps:
            dq = np.abs(n0[scale_steps:] - n0[:-scale_steps]) / (scale_steps * metric.step)
            quotients[scale_steps * metric.step] = float(np.max(dq))

    vol = metric.a * metric.b
    rate = cfg.weight_rate
    i2 = _weighted_all_basepoints(metric.r, n0**2 + n1**2 + nlap**2, vol, rate)
    i0 = _weighted_all_basepoints(metric.r, n0**2, vol, rate)
    in_e = set_e_membership(metric, cfg)

    outside = ~in_e
    w2 = float(np.max(np.sqrt(i2[outside]))) if np.any(outside) else 0.0
    w0 = float(np.max(np.sqrt(i0[outside]))) if np.any(outside) else 0.0

    return NormReport(sup_c0, sup_c1, sup_c2, quotients,
                      np.sqrt(i2), np.sqrt(i0), in_e,
                      hybrid_2=max(sup_c2, w2), hybrid_0=max(sup_c0, w0))


_EXP_FLAG_FACTOR = 50.0


def decomposition_norm(h: SymRadialTensor, metric: WarpedMetric, cfg: NormConfig,
                       c_r: float | None = None) -> NormReport:
    """Exponential norm of h - u plus |u| for the canonical trivial variation u.

    The plain exponential norm is reported alongside and flagged when it
    dwarfs the sup norm (the behaviour that forces the decomposition norm).
    """
    report = hybrid_norms(h, metric, cfg)
    if c_r is None:
        if metric.kind in ("tube", "interpolated"):
            c_r = 0.5 * (metric.r[0] + metric.r[-1])
        else:
            c_r = metric.r[-1] - 1.0
    u = canonical_variation(h, metric, c_r)
    remainder = h - u.as_tensor_for(metric)
    value = exponential_c0(remainder, metric, cfg.lam) + u.norm()
    exp_plain = exponential_c0(h, metric, cfg.lam)
    report.exp_c0 = exp_plain
    report.exp_flagged = exp_plain > _EXP_FLAG_FACTOR * max(report.sup_c0, 1e-300)
    report.decomposition_value = value
    report.variation = u
    return report
