"""The constant-coefficient ODE system of the linearized operator on an exact
cusp, its fundamental exponents, trivial Einstein variations, and the
quantitative growth checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, HypothesisError, ResolutionError
from .grids import deriv1, deriv2, grid_step, trapz
from .kernels import exp_kernel_cumulative
from .metrics import SymRadialTensor, WarpedMetric
from .operators import tensor_derivatives

SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class OdeBlock:
    """One block y'' + p y' + q y = F of the radial cusp system."""

    tag: str
    p: float
    q: float
    weight: int  # power of e^r multiplying the raw component

    @property
    def roots(self):
        disc = math.sqrt(self.p * self.p / 4.0 - self.q)
        return (-self.p / 2.0 - disc, -self.p / 2.0 + disc)

    def apply(self, y, dy, d2y):
        return d2y + self.p * dy + self.q * y

    def char(self, x: float) -> float:
        return x * x + self.p * x + self.q


TRACE_BLOCK = OdeBlock("trace", -2.0, -4.0, 0)
H33_BLOCK = OdeBlock("h33", -2.0, -4.0, 0)
HI3_BLOCK = OdeBlock("hi3", -2.0, -3.0, 1)
HIJ_BLOCK = OdeBlock("hij", -2.0, 0.0, 2)
BLOCKS = {b.tag: b for b in (TRACE_BLOCK, H33_BLOCK, HI3_BLOCK, HIJ_BLOCK)}

# every fundamental exponent of the system
ALL_RATES = (1.0 - SQRT5, 1.0 + SQRT5, -1.0, 3.0, 0.0, 2.0)


@dataclass
class TrivialEinsteinVariation:
    """u = e^{-2r} u_ij dx^i dx^j with flat trace zero; constant frame norm."""

    u11: float
    u12: float
    u22: float

    def __post_init__(self):
        if abs(self.u11 + self.u22) > 1e-10 * max(1.0, abs(self.u11), abs(self.u22)):
            raise DomainError("trivial Einstein variation must be trace-free (u11 + u22 = 0)")

    @classmethod
    def from_offdiag(cls, u11: float, u12: float) -> "TrivialEinsteinVariation":
        return cls(u11, u12, -u11)

    def norm(self) -> float:
        return math.sqrt(self.u11**2 + 2 * self.u12**2 + self.u22**2)

    def matrix(self) -> np.ndarray:
        return np.array([[self.u11, self.u12], [self.u12, self.u22]])

    def as_tensor(self, r: np.ndarray) -> SymRadialTensor:
        """Coordinate components on the exact cusp, with exact derivatives."""
        r = np.asarray(r, dtype=float)
        e2 = np.exp(-2.0 * r)
        vals = {"h11": self.u11 * e2, "h12": self.u12 * e2, "h22": self.u22 * e2}
        d1 = {k: -2.0 * v for k, v in vals.items()}
        d2 = {k: 4.0 * v for k, v in vals.items()}
        return SymRadialTensor.from_components(r, **vals, derivs=d1, derivs2=d2)

    def as_tensor_for(self, metric: WarpedMetric) -> SymRadialTensor:
        """Constant frame components u_ij against the given metric's frame."""
        a, da, d2a = metric.a, metric.da, metric.d2a
        b, db, d2b = metric.b, metric.db, metric.d2b
        vals = {"h11": self.u11 * a * a, "h12": self.u12 * a * b, "h22": self.u22 * b * b}
        d1 = {"h11": 2 * self.u11 * a * da, "h12": self.u12 * (da * b + a * db),
              "h22": 2 * self.u22 * b * db}
        d2 = {"h11": 2 * self.u11 * (da * da + a * d2a),
              "h12": self.u12 * (d2a * b + 2 * da * db + a * d2b),
              "h22": 2 * self.u22 * (db * db + b * d2b)}
        return SymRadialTensor.from_components(metric.r, **vals, derivs=d1, derivs2=d2)

    def __add__(self, other):
        return TrivialEinsteinVariation(self.u11 + other.u11, self.u12 + other.u12,
                                        self.u22 + other.u22)

    def __mul__(self, c: float):
        return TrivialEinsteinVariation(c * self.u11, c * self.u12, c * self.u22)

    __rmul__ = __mul__


@dataclass
class CuspResiduals:
    r: np.ndarray
    trace: np.ndarray
    h33: np.ndarray
    h13: np.ndarray
    h23: np.ndarray
    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray

    def max_residual(self) -> float:
        return float(max(np.max(np.abs(arr)) for arr in
                         (self.trace, self.h33, self.h13, self.h23, self.h11, self.h12, self.h22)))


def _weighted_derivatives(vals, dvals, d2vals, r, weight):
    """(w, w', w'') for w = e^{weight * r} * vals using exact product rule."""
    e = np.exp(weight * r)
    w = e * vals
    dw = e * (dvals + weight * vals)
    d2w = e * (d2vals + 2 * weight * dvals + weight * weight * vals)
    return w, dw, d2w


def assemble_system(h: SymRadialTensor, f: SymRadialTensor) -> CuspResiduals:
    """Block residuals of the radial system L h = f on the exact cusp.

    Zero residuals mean (h, f) satisfy, component by component,
      h33'' - 2 h33' - 4 h33                  = -2 f33,
      (e^r h_i3)'' - 2 (e^r h_i3)' - 3 e^r h_i3 = -2 e^r f_i3,
      (e^2r h_ij)'' - 2 (e^2r h_ij)'            = -2 e^2r f_ij + 2 d_ij (tr h - h33),
    plus the traced equation with polynomial X^2 - 2X - 4.
    """
    if h.r.shape != f.r.shape or not np.allclose(h.r, f.r):
        raise ResolutionError("h and f must share the cusp grid")
    r = h.r
    step = grid_step(r)
    dh, d2h = tensor_derivatives(h, step)
    e2 = np.exp(2.0 * r)

    def comp(arr, name):
        from .metrics import COMPONENT_INDEX
        i, j = COMPONENT_INDEX[name]
        return arr[:, i, j]

    # trace against the cusp metric: tr h = h33 + e^{2r} (h11 + h22)
    def traced(vals, dvals, d2vals):
        t33 = vals[:, 2, 2]
        dt33 = dvals[:, 2, 2]
        d2t33 = d2vals[:, 2, 2]
        s = vals[:, 0, 0] + vals[:, 1, 1]
        ds = dvals[:, 0, 0] + dvals[:, 1, 1]
        d2s = d2vals[:, 0, 0] + d2vals[:, 1, 1]
        w, dw, d2w = _weighted_derivatives(s, ds, d2s, r, 2)
        return t33 + w, dt33 + dw, d2t33 + d2w

    tr_h, dtr_h, d2tr_h = traced(h.comps, dh, d2h)
    tr_f = f.trace_against_cusp() if hasattr(f, "trace_against_cusp") else (
        f.comps[:, 2, 2] + e2 * (f.comps[:, 0, 0] + f.comps[:, 1, 1]))

    res_trace = TRACE_BLOCK.apply(tr_h, dtr_h, d2tr_h) + 2.0 * tr_f

    h33, dh33, d2h33 = h.comps[:, 2, 2], dh[:, 2, 2], d2h[:, 2, 2]
    res_h33 = H33_BLOCK.apply(h33, dh33, d2h33) + 2.0 * f.comps[:, 2, 2]

    def hi3_res(i):
        w, dw, d2w = _weighted_derivatives(h.comps[:, i, 2], dh[:, i, 2], d2h[:, i, 2], r, 1)
        return HI3_BLOCK.apply(w, dw, d2w) + 2.0 * np.exp(r) * f.comps[:, i, 2]

    def hij_res(i, j):
        w, dw, d2w = _weighted_derivatives(h.comps[:, i, j], dh[:, i, j], d2h[:, i, j], r, 2)
        out = HIJ_BLOCK.apply(w, dw, d2w) + 2.0 * e2 * f.comps[:, i, j]
        if i == j:
            out = out - 2.0 * (tr_h - h33)
        return out

    return CuspResiduals(r, res_trace, res_h33, hi3_res(0), hi3_res(1),
                         hij_res(0, 0), hij_res(0, 1), hij_res(1, 1))


def solve_block(block: OdeBlock, r: np.ndarray, forcing: np.ndarray,
                y0: float, dy0: float) -> np.ndarray:
    """Unique solution of y'' + p y' + q y = forcing with given initial data.

    Exact fundamental exponentials plus cubic-exact quadrature of the
    variation-of-constants kernel; no stepping error enters the exponents.
    """
    r = np.asarray(r, dtype=float)
    if r.size < 2 or r[-1] - r[0] < grid_step(r) - 1e-15:
        raise ResolutionError("interval shorter than one grid step")
    forcing = np.asarray(forcing, dtype=float)
    lam2, lam1 = block.roots
    h = grid_step(r)
    alpha1 = (dy0 - lam2 * y0) / (lam1 - lam2)
    alpha2 = y0 - alpha1
    s = r - r[0]
    y = alpha1 * np.exp(lam1 * s) + alpha2 * np.exp(lam2 * s)
    if np.any(forcing != 0.0):
        if r.size < 4:
            raise ResolutionError("forced solves need at least 4 grid points")
        i1 = exp_kernel_cumulative(forcing, h, lam1)
        i2 = exp_kernel_cumulative(forcing, h, lam2)
        y = y + (i1 - i2) / (lam1 - lam2)
    return y


def homogeneous_solution(block: OdeBlock, r, c_minus: float, c_plus: float) -> np.ndarray:
    lam2, lam1 = block.roots
    r = np.asarray(r, dtype=float)
    return c_minus * np.exp(lam2 * r) + c_plus * np.exp(lam1 * r)


def fit_growth_exponent(r: np.ndarray, y: np.ndarray, window=None,
                        min_points: int = 10) -> float:
    """Least-squares slope of log|y|; sign changes split the data and the
    dominant tail segment (nearest the window end) is fitted."""
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is not None:
        mask = (r >= window[0]) & (r <= window[1])
        r, y = r[mask], y[mask]
    if r.size < min_points:
        raise ResolutionError("too few samples in the fit window")
    tiny = 1e-300
    sign_flip = np.nonzero(np.diff(np.sign(y)) != 0)[0]
    start = sign_flip[-1] + 1 if sign_flip.size else 0
    if r.size - start < min_points:  # tail too short, use the longest segment
        bounds = np.concatenate(([0], sign_flip + 1, [r.size]))
        lengths = np.diff(bounds)
        k = int(np.argmax(lengths))
        start, stop = bounds[k], bounds[k + 1]
    else:
        stop = r.size
    seg_r, seg_y = r[start:stop], np.abs(y[start:stop]) + tiny
    slope = np.polyfit(seg_r, np.log(seg_y), 1)[0]
    return float(slope)


# ---------------------------------------------------------------------------
# classification of bounded solutions and the canonical trivial variation


@dataclass
class Classification:
    is_solution: bool
    accepted: bool
    variation: TrivialEinsteinVariation | None
    remainder: float
    zero_certified: bool
    rejected_modes: list = field(default_factory=list)
    residual: float = 0.0


def _fit_modes(r, values, rates):
    """Least-squares coefficients of sum_k c_k e^{rate_k r} with column scaling."""
    cols = [np.exp(rate * r) for rate in rates]
    scales = [max(float(np.max(np.abs(c))), 1e-300) for c in cols]
    a = np.stack([c / s for c, s in zip(cols, scales)], axis=1)
    coef, *_ = np.linalg.lstsq(a, values, rcond=None)
    return [float(c / s) for c, s in zip(coef, scales)], scales


def classify_bounded_solution(h: SymRadialTensor, lam: float,
                              residual_tol: float = 1e-6,
                              remainder_tol: float = 1e-4,
                              min_window: float = 20.0) -> Classification:
    """Classify a homogeneous radial solution on a two-sided cusp window.

    If |h| obeys the two-sided envelope C (e^{-lam r} + e^{lam r}) the only
    surviving fundamental mode is the rate-0 block, i.e. a trivial Einstein
    variation; two-sided decay certifies h = 0.
    """
    if not (0 < lam < 1):
        raise HypothesisError("classification requires lambda in (0, 1)")
    r = h.r
    if r[-1] - r[0] < min_window - 1e-9:
        raise HypothesisError(f"two-sided window must have length >= {min_window}")
    zero = SymRadialTensor.zeros(r)
    res = assemble_system(h, zero)
    residual = res.max_residual()
    if residual > residual_tol:
        raise HypothesisError(f"not a solution: residual {residual:.3e} > {residual_tol:.3e}")

    e1 = np.exp(r)
    e2 = np.exp(2.0 * r)
    frame_sup = float(np.max(np.sqrt(
        h.comps[:, 2, 2] ** 2
        + 2 * (e1 * h.comps[:, 0, 2]) ** 2 + 2 * (e1 * h.comps[:, 1, 2]) ** 2
        + (e2 * h.comps[:, 0, 0]) ** 2 + 2 * (e2 * h.comps[:, 0, 1]) ** 2
        + (e2 * h.comps[:, 1, 1]) ** 2)))
    if frame_sup <= remainder_tol:
        return Classification(True, True, TrivialEinsteinVariation(0.0, 0.0, 0.0),
                              frame_sup, True, [], residual)
    fields = {
        "h33": (h.comps[:, 2, 2], TRACE_BLOCK.roots),
        "h13": (e1 * h.comps[:, 0, 2], HI3_BLOCK.roots),
        "h23": (e1 * h.comps[:, 1, 2], HI3_BLOCK.roots),
        "h11": (e2 * h.comps[:, 0, 0], HIJ_BLOCK.roots),
        "h12": (e2 * h.comps[:, 0, 1], HIJ_BLOCK.roots),
        "h22": (e2 * h.comps[:, 1, 1], HIJ_BLOCK.roots),
    }
    overall = max(float(np.max(np.abs(v))) for v, _ in fields.values())
    overall = max(overall, 1e-300)

    rejected = []
    fitted = {}
    for name, (vals, rates) in fields.items():
        coefs, _ = _fit_modes(r, vals, rates)
        fitted[name] = coefs
        for rate, c in zip(rates, coefs):
            if abs(rate) <= lam + 1e-12:
                continue  # envelope-compatible mode (only rate 0 qualifies)
            size = abs(c) * float(np.max(np.exp(rate * r)))
            if size > remainder_tol * overall:
                rejected.append((name, rate, size / overall))
    if rejected:
        return Classification(True, False, None, float("nan"), False, rejected, residual)

    u = TrivialEinsteinVariation.from_offdiag(fitted["h11"][0], fitted["h12"][0])
    rem_t = h - u.as_tensor(r)
    # frame norm against the exact cusp
    rem_frame = np.sqrt(rem_t.comps[:, 2, 2] ** 2
                        + 2 * (e1 * rem_t.comps[:, 0, 2]) ** 2
                        + 2 * (e1 * rem_t.comps[:, 1, 2]) ** 2
                        + (e2 * rem_t.comps[:, 0, 0]) ** 2
                        + 2 * (e2 * rem_t.comps[:, 0, 1]) ** 2
                        + (e2 * rem_t.comps[:, 1, 1]) ** 2)
    remainder = float(np.max(rem_frame))
    zero_certified = remainder <= remainder_tol and u.norm() <= remainder_tol
    return Classification(True, True, u, remainder, zero_certified, [], residual)


def canonical_variation(h: SymRadialTensor, metric: WarpedMetric, c_r: float) -> TrivialEinsteinVariation:
    """Orthogonal projection of the frame (x1,x2)-block at c_r onto the
    trace-free constants; |u| <= |h|(c_r) by construction."""
    idx = int(np.argmin(np.abs(h.r - c_r)))
    frame = h.frame_components(metric)[idx]
    u11 = 0.5 * (frame[0, 0] - frame[1, 1])
    return TrivialEinsteinVariation.from_offdiag(float(u11), float(frame[0, 1]))


# ---------------------------------------------------------------------------
# growth-rate bound check


@dataclass
class GrowthReport:
    r: np.ndarray
    solution: np.ndarray
    bound: np.ndarray
    max_ratio: float
    forcing_slack: float
    boundary_w: float


def growth_bound_check(r: np.ndarray, y: np.ndarray, block: OdeBlock,
                       w_terms, psi: np.ndarray, a: float, big_r: float,
                       forcing_slack_tol: float = 10.0) -> GrowthReport:
    """Pointwise ratio of |y| to the two-sided window growth bound.

    The bound is e^{l2 r} (|y|(0) + W(0) + |psi|_L1) + e^{l1 (r - R)}
    + W(r) + |psi|_L1 e^{-a r}, for W(r) = sum beta_k e^{mu_k r}; y must
    solve the block equation with forcing dominated by W + psi e^{-a r}.
    """
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if np.max(np.abs(y)) > 1.0 + 1e-9:
        raise HypothesisError("growth check requires |y| <= 1")
    if a < 0:
        raise HypothesisError("decay rate a must be nonnegative")
    lam2, lam1 = block.roots
    if not (lam2 <= 0.0 < lam1):
        raise HypothesisError("block must have roots lam2 <= 0 < lam1")
    for _, mu in w_terms:
        if min(abs(mu - lam1), abs(mu - lam2)) < 1e-9:
            raise HypothesisError("W rates must avoid the fundamental roots")

    def w_of(rr):
        out = np.zeros_like(rr)
        for beta, mu in w_terms:
            out = out + beta * np.exp(mu * rr)
        return out

    w_vals = w_of(r)
    boundary = w_vals[(r >= big_r - 2) & (r <= big_r - 1)]
    boundary_w = float(np.max(boundary)) if boundary.size else float(w_vals[-1])

    h = grid_step(r)
    psi_l1 = float(trapz(np.abs(psi), dx=h))
    forcing = block.apply(y, deriv1(y, h), deriv2(y, h))
    # allow finite-difference noise on homogeneous solutions
    floor = 1e-8 * max(1.0, float(np.max(np.abs(y))))
    envelope = w_vals + psi * np.exp(-a * r) + floor
    interior = slice(2, -2)  # boundary stencils are 2nd order only
    slack = float(np.max(np.abs(forcing[interior]) / envelope[interior]))
    if slack > forcing_slack_tol:
        raise HypothesisError(f"forcing exceeds the stated envelope (slack {slack:.2f})")

    bound = (np.exp(lam2 * r) * (abs(y[0]) + float(w_of(np.array([0.0]))[0]) + psi_l1)
             + np.exp(lam1 * (r - big_r)) + w_vals + psi_l1 * np.exp(-a * r))
    ratio = np.abs(y) / bound
    return GrowthReport(r, y, bound, float(np.max(ratio)), slack, boundary_w)
