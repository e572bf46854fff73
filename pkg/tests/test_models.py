import math

import numpy as np

from pinchlab.grids import trapz
import pytest

from pinchlab import constants
from pinchlab.exceptions import DomainError, HypothesisError
from pinchlab.metrics import curvature_of_warped
from pinchlab.models import (BumpProfile, CutoffProfile, TubeGeometry,
                             counterexample_metric, cusp_metric,
                             drilling_interpolation, filling_interpolation,
                             futer_radius_bound, hyperbolic_tube,
                             pinching_sweep, sparsity_sum,
                             weighted_ricci_deficit)


def test_cutoff_profile_invariants():
    sigma = CutoffProfile()
    sigma.check_invariants()
    assert sigma(np.array([-1.0])) == 1.0
    assert sigma(np.array([0.0])) == 0.0
    t = np.linspace(-1, 0, 20001)
    assert np.max(np.abs(sigma.d1(t))) <= sigma.sup_d1 + 1e-12
    assert np.max(np.abs(sigma.d2(t))) <= sigma.sup_d2 + 1e-12
    # junctions are C^3: second derivative dies off quartically
    eps = np.array([-1.0 + 1e-4, -1e-4])
    assert np.max(np.abs(sigma.d2(eps))) < 1e-4


def test_bump_profile_invariants():
    for delta, big_r in ((0.05, 1.0), (0.01, 2.0), (0.3, 5.0)):
        bump = BumpProfile(delta, big_r)
        bump.check_invariants()
        assert bump.support <= big_r / delta + 4
    with pytest.raises(DomainError):
        BumpProfile(2.0, 1.0)


def test_bump_integral_exact():
    bump = BumpProfile(0.02, 1.5)
    s = np.linspace(0, bump.support + 1, 200001)
    quad = trapz(bump(s), s)
    assert quad == pytest.approx(1.5, rel=1e-7)
    # the piecewise antiderivative agrees with quadrature midway
    mid = bump.support / 2
    s_mid = np.linspace(0, mid, 100001)
    partial = trapz(bump(s_mid), s_mid)
    assert bump.integral_to(np.array([mid]))[0] == pytest.approx(partial, rel=1e-6)


def test_tube_geometry_closed_forms():
    geom = TubeGeometry(0.01, 2.0)
    assert geom.meridian_length == pytest.approx(2 * math.pi * math.sinh(2.0), rel=1e-12)
    assert geom.boundary_area == pytest.approx(
        2 * math.pi * 0.01 * math.sinh(2.0) * math.cosh(2.0), rel=1e-12)
    assert geom.meridian_length == pytest.approx(22.7882, abs=1e-3)
    assert geom.boundary_area == pytest.approx(0.8573, abs=1e-3)
    assert geom.margulis_compatible(mu=0.1)  # 0.01 cosh 2 = 0.0376 <= 0.2
    assert not TubeGeometry(0.2, 2.0).margulis_compatible(mu=0.1)


def test_hyperbolic_tube_curvature():
    metric, _ = hyperbolic_tube(0.01, 4.0)
    assert curvature_of_warped(metric).sup_sec_deviation(-1.0) <= 1e-8
    with pytest.raises(DomainError):
        hyperbolic_tube(-1.0, 2.0)


def test_futer_radius_bound():
    val, vacuous = futer_radius_bound(0.001, 0.3)
    assert not vacuous
    assert val == pytest.approx(math.acosh(0.3 / math.sqrt(0.008)), rel=1e-12)
    assert val == pytest.approx(1.8803, abs=2e-4)
    # argument exactly 1 -> bound 0
    eps = 0.3
    val
    v2, vac2 = futer_radius_bound(eps * eps / 8, eps)
    assert v2 == 0.0 and not vac2
    v3, _ = futer_radius_bound(0.005, 0.3)
    assert v3 == pytest.approx(math.acosh(1.5), rel=1e-12)
    assert v3 == pytest.approx(0.9624, abs=1e-4)
    with pytest.raises(HypothesisError):
        futer_radius_bound(1.0, 0.3)
    with pytest.raises(HypothesisError):
        futer_radius_bound(0.001, 0.5)


def test_futer_monotonicity():
    ells = np.linspace(1e-4, 8 * 0.09 * 0.9, 30)
    vals = [futer_radius_bound(l, 0.3)[0] for l in ells]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    epss = np.linspace(0.1, 0.3, 20)
    vals_e = [futer_radius_bound(1e-4, e)[0] for e in epss]
    assert all(b >= a - 1e-12 for a, b in zip(vals_e, vals_e[1:]))


def test_drilling_interpolation_regions():
    metric = drilling_interpolation(5.0, step=1e-3)
    data = curvature_of_warped(metric)
    r = metric.r
    outside = (r <= 4.0) | (r >= 5.0)
    dev = np.maximum(np.abs(data.sec_r1 + 1),
                     np.maximum(np.abs(data.sec_r2 + 1), np.abs(data.sec_12 + 1)))
    assert np.max(dev[outside]) <= 1e-8
    assert np.max(dev) > 1e-6  # the transition zone carries the pinching
    metric.check_invariants()
    with pytest.raises(DomainError):
        drilling_interpolation(2.0)


def test_filling_interpolation_regions_and_matching():
    radius = 5.0
    metric = filling_interpolation(radius, step=1e-3)
    data = curvature_of_warped(metric)
    t = metric.r
    outside = (t <= -1.0) | (t >= 0.0)
    dev = np.maximum(np.abs(data.sec_r1 + 1),
                     np.maximum(np.abs(data.sec_r2 + 1), np.abs(data.sec_12 + 1)))
    assert np.max(dev[outside]) <= 1e-8
    # inner boundary matches (sinh(R-t), cosh(R-t)) exactly
    inner = t <= -1.0
    assert np.max(np.abs(metric.a[inner] - np.sinh(radius - t[inner]))) <= 1e-10 * np.sinh(radius + 1)
    assert np.max(np.abs(metric.b[inner] - np.cosh(radius - t[inner]))) <= 1e-10 * np.cosh(radius + 1)
    metric.check_invariants()
    with pytest.raises(DomainError):
        filling_interpolation(2.5)


def test_pinching_sweep_slopes():
    radii = [4.0, 5.0, 6.0]
    _, slope_d, _ = pinching_sweep(lambda rr: drilling_interpolation(rr, step=2e-3), radii)
    assert slope_d == pytest.approx(-2.0, abs=0.1)
    _, slope_f, _ = pinching_sweep(lambda rr: filling_interpolation(rr, step=2e-3), radii)
    assert slope_f == pytest.approx(-2.0, abs=0.1)


def test_counterexample_trivial_deformation():
    # delta -> 0 keeps the metric hyperbolic; f == 0 exactly outside support
    metric, bump, warn = counterexample_metric(0.01, 1.0, 2.0, step=1e-3)
    assert not warn
    r = metric.r
    before = r <= 2.0
    data = curvature_of_warped(metric)
    dev = np.maximum(np.abs(data.sec_r1 + 1),
                     np.maximum(np.abs(data.sec_r2 + 1), np.abs(data.sec_12 + 1)))
    assert np.max(dev[before]) <= 1e-12
    # far end stretches the x2 circle by exactly e^R
    assert metric.b[-1] / metric.a[-1] == pytest.approx(math.exp(1.0), rel=1e-12)


def test_counterexample_pinching_scaling():
    eps = []
    for delta in (0.04, 0.02, 0.01):
        metric, _, _ = counterexample_metric(delta, 1.0, 2.0, step=1e-3)
        eps.append(curvature_of_warped(metric).sup_sec_deviation(-1.0))
    assert eps[0] > eps[1] > eps[2] > 0
    assert eps[0] <= 3.5 * 0.04  # calibrated eps(delta) bound


def test_weighted_ricci_deficit():
    metric, _, _ = counterexample_metric(0.01, 1.0, 2.0, step=1e-3)
    value, bound, eps = weighted_ricci_deficit(metric, 1.0)
    assert 0 < value <= bound
    # hyperbolic metric integrates to zero
    hyp = cusp_metric(0.0, 5.0, 1e-3)
    hyp.boundary_inj = 0.1
    hyp.boundary_diam = 0.14
    hyp.boundary_area = 0.04
    v0, _, _ = weighted_ricci_deficit(hyp, 1.0)
    assert v0 <= 1e-20
    with pytest.raises(HypothesisError):
        weighted_ricci_deficit(metric, 2.5)
    with pytest.raises(DomainError):
        weighted_ricci_deficit(cusp_metric(0.0, 2.0, 1e-3), 1.0)


def test_weighted_deficit_quadratic_scaling():
    vals = []
    for delta in (0.02, 0.01):
        metric, _, _ = counterexample_metric(delta, 1.0, 2.0, step=1e-3)
        vals.append(weighted_ricci_deficit(metric, 1.0)[0])
    assert vals[0] / vals[1] == pytest.approx(4.0, abs=0.7)


def test_sparsity_sum_single_and_empty():
    total, bound = sparsity_sum([5.0], 0.1, 0.5, 1.0)
    assert total == pytest.approx(math.exp(-1.9 * 5), rel=1e-12)
    assert bound == pytest.approx(math.exp(-1.4 * 4) / 1.4, rel=1e-12)
    assert total <= bound
    total0, bound0 = sparsity_sum([], 0.1, 0.5, 1.0)
    assert total0 == 0.0


def test_sparsity_sum_geometric_family():
    dists = list(range(1, 51))
    total, bound = sparsity_sum(dists, 0.1, 0.5, 1.0)
    assert total <= bound


def test_sparsity_sum_hypothesis_violation():
    with pytest.raises(HypothesisError):
        sparsity_sum([0.1, 0.11, 0.12, 0.13], 0.1, 0.5, 1.0)
    with pytest.raises(HypothesisError):
        sparsity_sum([1.0], 1.5, 0.6, 1.0)
