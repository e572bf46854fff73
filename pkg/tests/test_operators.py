import numpy as np
import pytest

from pinchlab.grids import radial_grid
from pinchlab.metrics import SymRadialTensor, metric_as_tensor
from pinchlab.models import cusp_metric, hyperbolic_tube
from pinchlab.cusp import TrivialEinsteinVariation
from pinchlab import operators as ops

from .conftest import compact_envelope, smooth_field
from .oracles import bianchi_dr_bruteforce


def test_bianchi_of_metric_itself_vanishes(tube):
    beta = ops.bianchi(tube, tube)
    assert np.max(np.abs(beta)) < 1e-12


def test_bianchi_conformal_closed_form(cusp_window):
    # beta(u g)_dr = (n/2 - 1) u' = u'/2 for n = 3
    r = cusp_window.r
    u = np.exp(-0.8 * r)
    g = metric_as_tensor(cusp_window)
    t = SymRadialTensor(r, u[:, None, None] * g.comps,
                        d_comps=(-0.8 * u)[:, None, None] * g.comps + u[:, None, None] * g.d_comps)
    beta = ops.bianchi(cusp_window, t)
    expected = 0.5 * (-0.8) * u
    interior = slice(2, -2)
    assert np.max(np.abs(beta[interior, 2] - expected[interior])) < 1e-9
    assert np.max(np.abs(beta[interior, 0])) < 1e-12


def test_bianchi_against_bruteforce(cusp_window):
    r = cusp_window.r

    def g_ref(rv):
        return np.diag([np.exp(-2 * rv), np.exp(-2 * rv), 1.0])

    def t_of(rv):
        return np.diag([np.exp(-3 * rv), 0.5 * np.exp(-2 * rv), 0.3 * np.exp(-rv)])

    t = SymRadialTensor.from_components(r, h11=np.exp(-3 * r), h22=0.5 * np.exp(-2 * r),
                                        h33=0.3 * np.exp(-r))
    beta = ops.bianchi(cusp_window, t)
    for idx in (200, r.size // 2, r.size - 200):
        oracle = bianchi_dr_bruteforce(r, g_ref, t_of, idx)
        assert beta[idx, 2] == pytest.approx(oracle, rel=1e-6, abs=1e-9)


def test_bianchi_of_trivial_variation(cusp_window):
    # trace-free Einstein variations are divergence-free: beta = 0 exactly
    u = TrivialEinsteinVariation.from_offdiag(0.4, -0.2)
    beta = ops.bianchi(cusp_window, u.as_tensor(cusp_window.r))
    assert np.max(np.abs(beta)) < 1e-12
    # a non-trace-free variation has constant dr component -(u11 + u22)
    r = cusp_window.r
    e2 = np.exp(-2 * r)
    v = SymRadialTensor.from_components(
        r, h11=0.5 * e2, h22=0.3 * e2,
        derivs={"h11": -e2, "h22": -0.6 * e2},
        derivs2={"h11": 2 * e2, "h22": 1.2 * e2})
    beta_v = ops.bianchi(cusp_window, v)
    assert np.max(np.abs(beta_v[:, 2] + 0.8)) < 1e-10


def test_einstein_operator_zero_on_hyperbolic(tube):
    phi = ops.einstein_operator(tube, tube)
    assert np.max(np.abs(phi.comps)) < 1e-10


def test_einstein_operator_self_background_drops_gauge_term():
    # Phi(g, g) = Ric(g) + 2g for arbitrary g (Bianchi self-term vanishes)
    r = radial_grid(0.2, 2.0, 1e-3)
    a = 1.0 + 0.3 * np.sin(r)
    da = 0.3 * np.cos(r)
    d2a = -0.3 * np.sin(r)
    b = np.cosh(r)
    from pinchlab.metrics import WarpedMetric
    g = WarpedMetric(r, a, da, d2a, b, np.sinh(r), np.cosh(r), kind="interpolated")
    phi = ops.einstein_operator(g, g)
    struct = ops.structure_of_warped(g)
    expected = struct.ricci + 2 * struct.g
    assert np.max(np.abs(phi.comps - expected)) < 1e-10


def test_linearized_on_metric_itself(cusp_window):
    g_t = metric_as_tensor(cusp_window)
    out = ops.linearized_einstein(g_t, cusp_window)
    diff = SymRadialTensor(cusp_window.r, out.comps - 2 * g_t.comps)
    assert np.max(diff.frame_norm(cusp_window)) < 1e-12


def test_linearized_kills_trivial_variation(cusp_window):
    u = TrivialEinsteinVariation.from_offdiag(0.7, -0.3)
    out = ops.linearized_einstein(u.as_tensor(cusp_window.r), cusp_window)
    assert np.max(SymRadialTensor(cusp_window.r, out.comps).frame_norm(cusp_window)) < 1e-10


def test_linearized_trace_ode(cusp_window):
    # pure-trace h with tr h = e^{-r}: tr(L h) = -(y'' - 2y' - 4y)/2 at y = e^{-r}
    r = cusp_window.r
    u = np.exp(-r) / 3.0
    g = metric_as_tensor(cusp_window)
    h = SymRadialTensor(
        r, u[:, None, None] * g.comps,
        d_comps=(-u)[:, None, None] * g.comps + u[:, None, None] * g.d_comps,
        d2_comps=u[:, None, None] * g.comps + 2 * (-u)[:, None, None] * g.d_comps
        + u[:, None, None] * g.d2_comps)
    out = ops.linearized_einstein(h, cusp_window)
    y = np.exp(-r)
    expected_trace = -0.5 * (y - 2 * (-y) - 4 * y)  # -(y'' - 2y' - 4y)/2
    assert np.max(np.abs(out.trace(cusp_window) - expected_trace)) < 1e-10


def test_gradient_check(cusp_window, rng):
    # directional difference quotient of the nonlinear operator matches L h
    r = cusp_window.r
    env = compact_envelope(r)
    h = smooth_field(cusp_window, rng, envelope=env, scale=0.2)
    t = 1e-5
    ref = ops.structure_of_warped(cusp_window)
    plus = ops.einstein_operator_from_structures(ops.structure_of_perturbed(cusp_window, h, t), ref)
    minus = ops.einstein_operator_from_structures(ops.structure_of_perturbed(cusp_window, h, -t), ref)
    fd = (plus.comps - minus.comps) / (2 * t)
    lh = ops.linearized_einstein(h, cusp_window)
    num = np.max(SymRadialTensor(r, fd - lh.comps).frame_norm(cusp_window))
    den = np.max(lh.frame_norm(cusp_window))
    assert num / den < 1e-6


def test_einstein_operator_residual_decay():
    # sup |Phi(g)| for the drilling family decays like e^{-2R}
    radii = [4.0, 5.0, 6.0, 7.0, 8.0]
    sups = []
    for rr in radii:
        from pinchlab.models import drilling_interpolation
        g = drilling_interpolation(rr, step=2e-3)
        phi = ops.einstein_operator(g, g)
        sups.append(np.max(phi.frame_norm(g)))
    slope = np.polyfit(radii, np.log(sups), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)


def test_sectional_range_general_metric(drilling5):
    struct = ops.structure_of_warped(drilling5)
    eig = ops.sectional_range(struct)
    dev = np.max(np.abs(eig + 1.0))
    # matches the warped closed form for diagonal metrics
    from pinchlab.metrics import curvature_of_warped
    data = curvature_of_warped(drilling5)
    assert dev == pytest.approx(data.sup_sec_deviation(-1.0), rel=1e-6)


def test_frame_apply_matches_coordinate_apply(cusp_window, rng):
    r = cusp_window.r
    h = smooth_field(cusp_window, rng, envelope=compact_envelope(r))
    lh = ops.linearized_einstein(h, cusp_window)
    w, _, _ = ops.frame_weight_fields(cusp_window)
    v = ops.pack_sym(h.comps) / w
    out_frame = ops.apply_lichnerowicz_frame(v, cusp_window)
    expected = ops.pack_sym(lh.comps) / w
    interior = slice(5, -5)
    assert np.max(np.abs(out_frame[interior] - expected[interior])) < 1e-7
