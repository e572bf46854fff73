"""Inversion of the linearized operator on decaying radial tensors, the
fixed-point iteration perturbing almost-hyperbolic metrics to Einstein
metrics, and the integral-inequality checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import constants
from .cusp import TrivialEinsteinVariation, canonical_variation
from .exceptions import ConvergenceError, HypothesisError, SupportError
from .grids import check_shared_grid, stencil_rows_deriv1, stencil_rows_deriv2, trapz
from .metrics import SymRadialTensor, WarpedMetric
from .norms import NormConfig, hybrid_norms
from .operators import (apply_lichnerowicz_frame, covariant_derivatives,
                        einstein_operator_from_structures, frame_norm_3form,
                        frame_norm_4form, frame_norm_from_packed,
                        frame_norm_general, frame_weight_fields,
                        lichnerowicz_frame_matrices, pack_sym, sectional_range, structure_of_perturbed,
                        structure_of_warped, tensor_derivatives, unpack_sym,
                        weitzenboeck_action)

BOUNDARY_POLICIES = ("decay-both-ends", "match-hyperbolic-ends")


def _assemble_operator(background: WarpedMetric) -> sp.csc_matrix:
    """Sparse 6N x 6N discretization of the linearized operator in frame
    variables.

    Row block k is L2[k] D2 + L1[k] D1 + L0[k]; the two rows at each end are
    replaced by Dirichlet conditions v = 0 (the boundary policies of the
    module both pin the ends, see invert_linearized).
    """
    n = background.r.size
    a0, a1, a2 = lichnerowicz_frame_matrices(background)
    rows_all, cols_all, vals_all = [], [], []

    for blk, stencil in ((a1, stencil_rows_deriv1(n, background.step)),
                         (a2, stencil_rows_deriv2(n, background.step))):
        srow, scol, sval = stencil
        interior = (srow != 0) & (srow != n - 1)
        srow, scol, sval = srow[interior], scol[interior], sval[interior]
        for c in range(6):
            for cp in range(6):
                coeff = blk[srow, c, cp] * sval
                keep = coeff != 0.0
                rows_all.append(6 * srow[keep] + c)
                cols_all.append(6 * scol[keep] + cp)
                vals_all.append(coeff[keep])

    idx = np.arange(1, n - 1)
    for c in range(6):
        for cp in range(6):
            coeff = a0[idx, c, cp]
            keep = coeff != 0.0
            rows_all.append(6 * idx[keep] + c)
            cols_all.append(6 * idx[keep] + cp)
            vals_all.append(coeff[keep])

    for k in (0, n - 1):
        for c in range(6):
            rows_all.append(np.array([6 * k + c]))
            cols_all.append(np.array([6 * k + c]))
            vals_all.append(np.array([1.0]))

    rows = np.concatenate(rows_all)
    cols = np.concatenate(cols_all)
    vals = np.concatenate(vals_all)
    return sp.csc_matrix(sp.coo_matrix((vals, (rows, cols)), shape=(6 * n, 6 * n)))


@dataclass
class LinearizedSolver:
    """Factorized discrete linearized operator on a fixed background.

    Assembly, solve and the residual all live in frame variables, keeping
    every floating-point intermediate at the scale of the frame norms.
    """

    background: WarpedMetric

    def __post_init__(self):
        self._matrix = _assemble_operator(self.background)
        self._lu = spla.splu(self._matrix)
        self._n = self.background.r.size
        self._weights, _, _ = frame_weight_fields(self.background)

    def solve_frame(self, f_frame: np.ndarray, refine: int = 2) -> np.ndarray:
        """Frame components of h with L h = f, Dirichlet-pinned ends.

        A couple of iterative-refinement sweeps push the algebraic residual
        down to the roundoff floor of the matrix application.
        """
        rhs = f_frame.copy()
        rhs[0] = 0.0
        rhs[-1] = 0.0
        b = rhs.reshape(-1)
        x = self._lu.solve(b)
        for _ in range(refine):
            x = x + self._lu.solve(b - self._matrix @ x)
        return x.reshape(self._n, 6)

    def solve(self, f: SymRadialTensor) -> SymRadialTensor:
        v = self.solve_frame(pack_sym(f.comps) / self._weights)
        return SymRadialTensor(self.background.r, unpack_sym(self._weights * v))

    def frame_residual(self, f: SymRadialTensor, h: SymRadialTensor) -> float:
        """sup frame |L h - f| over the equation rows (ends are constraints)."""
        v = pack_sym(h.comps) / self._weights
        out = apply_lichnerowicz_frame(v, self.background)
        gap = out - pack_sym(f.comps) / self._weights
        return float(np.max(frame_norm_from_packed(gap)[1:-1]))


@dataclass
class InversionResult:
    h: SymRadialTensor
    residual: float
    norm_ratio: float
    flagged_resonance: bool
    variation: TrivialEinsteinVariation | None
    h_reduced: SymRadialTensor | None


def invert_linearized(f: SymRadialTensor, metric: WarpedMetric,
                      boundary_policy: str = "match-hyperbolic-ends",
                      cfg: NormConfig | None = None,
                      solver: LinearizedSolver | None = None,
                      resonance_factor: float = 0.2) -> InversionResult:
    """Solve L h = f with growing fundamental modes suppressed.

    Both policies pin h = 0 at the window ends (decaying data and matching
    hyperbolic ends coincide there for our models); under the decay policy a
    surviving constant-frame tail - forcing resonant with the rate-0 mode -
    is flagged and removed by subtracting the canonical trivial variation.
    """
    if boundary_policy not in BOUNDARY_POLICIES:
        raise HypothesisError(f"unknown boundary policy {boundary_policy!r}")
    check_shared_grid(f.r, metric.r)
    cfg = cfg or NormConfig()
    solver = solver or LinearizedSolver(metric)
    h = solver.solve(f)
    # the two pinned rows carry the boundary condition, not the equation
    residual = solver.frame_residual(f, h)
    rep_h = hybrid_norms(h, metric, cfg)
    rep_f = hybrid_norms(f, metric, cfg)
    ratio = rep_h.hybrid_2 / rep_f.hybrid_0 if rep_f.hybrid_0 > 0 else 0.0

    flagged = False
    variation = None
    reduced = None
    if boundary_policy == "decay-both-ends" and metric.kind in ("cusp", "deformed"):
        u = canonical_variation(h, metric, float(metric.r[-1] - 1.0))
        if u.norm() > resonance_factor * max(rep_f.sup_c0, 1e-300):
            flagged = True
            variation = u
            reduced = h - u.as_tensor_for(metric)
    return InversionResult(h, residual, float(ratio), flagged, variation, reduced)


# ---------------------------------------------------------------------------
# fixed-point iteration


@dataclass
class BanachResult:
    converged: bool
    h: SymRadialTensor
    g0_comps: np.ndarray
    trace: list
    contraction_ratios: list
    final_residual: float
    final_sec_deviation: float
    c2_distance: float
    initial_residual: float
    hypothesis_warning: bool


def c2_distance(h: SymRadialTensor, background: WarpedMetric) -> float:
    """sup |h| + |grad h| + |grad^2 h| in the background frame."""
    struct = structure_of_warped(background)
    dh, d2h = tensor_derivatives(h, background.step)
    nab1, nab2 = covariant_derivatives(struct, h.comps, dh, d2h)
    total = (frame_norm_general(struct, h.comps) + frame_norm_3form(struct, nab1)
             + frame_norm_4form(struct, nab2))
    return float(np.max(total))


def banach_iterate(g_bar: WarpedMetric, cfg: NormConfig | None = None,
                   tol: float = 1e-8, max_iter: int = 40,
                   boundary_policy: str = "match-hyperbolic-ends",
                   eps0: float = constants.CONTRACTION_EPS0,
                   raise_on_divergence: bool = True) -> BanachResult:
    """Iterate h <- h - L^{-1} Phi(g_bar + h) from h = 0.

    The nonlinear operator is re-evaluated through the full curvature
    pipeline at every step (no Taylor shortcut); contraction ratios are
    reported and the final metric's sectional deviation is measured
    independently through the coordinate curvature of g_bar + h.
    """
    cfg = cfg or NormConfig()
    struct_ref = structure_of_warped(g_bar)
    phi0 = einstein_operator_from_structures(struct_ref, struct_ref)
    res0 = float(np.max(phi0.frame_norm(g_bar)))
    warning = res0 > eps0
    trace = [{"step": 0, "phi_norm": res0, "h_norm": 0.0}]
    if res0 <= tol:
        zero = SymRadialTensor.zeros(g_bar.r)
        eig = sectional_range(struct_ref)
        return BanachResult(True, zero, g_bar.coordinate_matrix(), trace, [],
                            res0, float(np.max(np.abs(eig + 1))), 0.0, res0, warning)

    solver = LinearizedSolver(g_bar)
    h = SymRadialTensor.zeros(g_bar.r)
    steps = []
    ratios = []
    phi_norm = res0
    phi = phi0
    converged = False
    for k in range(1, max_iter + 1):
        delta = solver.solve(phi) * (-1.0)
        h = SymRadialTensor(g_bar.r, h.comps + delta.comps)
        step_norm = float(np.max(delta.frame_norm(g_bar)))
        steps.append(step_norm)
        if len(steps) >= 2:
            ratios.append(steps[-1] / steps[-2] if steps[-2] > 0 else 0.0)
        struct_g = structure_of_perturbed(g_bar, h)
        phi = einstein_operator_from_structures(struct_g, struct_ref)
        phi_norm = float(np.max(phi.frame_norm(g_bar)))
        pinching = float(np.max(np.abs(sectional_range(struct_g) + 1.0)))
        trace.append({"step": k, "phi_norm": phi_norm, "h_norm": step_norm,
                      "ratio": ratios[-1] if ratios else None, "pinching": pinching})
        if phi_norm <= tol:
            converged = True
            break
        if len(ratios) >= 2 and ratios[-1] > 0.9 and ratios[-2] > 0.9:
            if raise_on_divergence:
                raise ConvergenceError(
                    f"contraction ratios {ratios[-2]:.3f}, {ratios[-1]:.3f} exceed 0.9",
                    trace=trace)
            break

    struct_g = structure_of_perturbed(g_bar, h)
    eig = sectional_range(struct_g)
    sec_dev = float(np.max(np.abs(eig + 1)))
    dist = c2_distance(h, g_bar)
    return BanachResult(converged, h, struct_g.g, trace, ratios, phi_norm,
                        sec_dev, dist, res0, warning)


def metric_from_solution(g_bar: WarpedMetric, h: SymRadialTensor,
                         offdiag_tol: float = 1e-8) -> WarpedMetric:
    """Re-express the diagonal radial metric g_bar + h in warped form.

    Reparametrizes rho = int sqrt(g_rr) dr to restore unit radial lapse and
    resamples the warp profiles on a uniform rho-grid (derivatives by
    finite differences, consistent by construction).
    """
    g = g_bar.coordinate_matrix() + h.comps
    off = max(np.max(np.abs(g[:, 0, 1])), np.max(np.abs(g[:, 0, 2])), np.max(np.abs(g[:, 1, 2])))
    if off > offdiag_tol * max(1.0, np.max(np.abs(g))):
        raise HypothesisError("solution metric is not diagonal; warped form unavailable")
    from scipy.interpolate import CubicSpline

    from .grids import deriv1

    # arc-length reparametrization: cumulative trapezoid with the
    # Euler-Maclaurin endpoint correction (4th order)
    lapse = np.sqrt(g[:, 2, 2])
    h_step = g_bar.step
    rho = np.concatenate(([0.0], np.cumsum(0.5 * (lapse[1:] + lapse[:-1]) * h_step)))
    dl = deriv1(lapse, h_step)
    rho = rho - h_step**2 / 12.0 * (dl - dl[0])
    spline_a = CubicSpline(rho, np.sqrt(g[:, 0, 0]))
    spline_b = CubicSpline(rho, np.sqrt(g[:, 1, 1]))
    rho_uniform = np.linspace(0.0, rho[-1], g_bar.r.size)
    return WarpedMetric(rho_uniform,
                        spline_a(rho_uniform), spline_a(rho_uniform, 1), spline_a(rho_uniform, 2),
                        spline_b(rho_uniform), spline_b(rho_uniform, 1), spline_b(rho_uniform, 2),
                        kind="interpolated")


# ---------------------------------------------------------------------------
# integral inequalities


@dataclass
class IntegralReport:
    h_l2_sq: float
    grad_l2_sq: float
    ric_pairing: float
    first_inequality_margin: float
    rayleigh: float | None
    trace_sup: float


def integral_inequality_checks(h: SymRadialTensor, metric: WarpedMetric,
                               support_margin: int = 3,
                               traceless_tol: float = 1e-10) -> IntegralReport:
    """Quadrature of |h|^2, |grad h|^2 and (Ric(h), h) for compactly
    supported radial tensors; the Bochner-type margin and, for traceless
    fields, the Rayleigh quotient of the spectral-gap inequality."""
    check_shared_grid(h.r, metric.r)
    edge = np.concatenate([h.comps[:support_margin].ravel(), h.comps[-support_margin:].ravel()])
    if np.max(np.abs(edge)) > 1e-12 * max(1.0, float(np.max(np.abs(h.comps)))):
        raise SupportError("field must vanish near the window boundary")
    struct = structure_of_warped(metric)
    dh, d2h = tensor_derivatives(h, metric.step)
    nab1, _ = covariant_derivatives(struct, h.comps, dh, d2h)
    vol = metric.a * metric.b
    n0sq = frame_norm_general(struct, h.comps) ** 2
    n1sq = frame_norm_3form(struct, nab1) ** 2
    weitz = weitzenboeck_action(struct, h.comps)
    up = np.einsum("nma,nvb,nab->nmv", struct.g_inv, struct.g_inv, weitz)
    pair = np.einsum("nmv,nmv->n", up, h.comps)

    h_l2 = float(trapz(n0sq * vol, h.r))
    grad_l2 = float(trapz(n1sq * vol, h.r))
    ric_pair = float(trapz(pair * vol, h.r))
    margin = grad_l2 + 0.5 * ric_pair
    trace_sup = float(np.max(np.abs(h.trace(metric))))
    rayleigh = grad_l2 / h_l2 if (h_l2 > 0 and trace_sup <= traceless_tol) else None
    return IntegralReport(h_l2, grad_l2, ric_pair, margin, rayleigh, trace_sup)
