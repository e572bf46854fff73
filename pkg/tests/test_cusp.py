import math

import numpy as np
import pytest

from pinchlab import constants
from pinchlab.cusp import (ALL_RATES, BLOCKS, HI3_BLOCK, HIJ_BLOCK,
                           TRACE_BLOCK, H33_BLOCK, Classification,
                           TrivialEinsteinVariation, assemble_system,
                           canonical_variation, classify_bounded_solution,
                           fit_growth_exponent, growth_bound_check,
                           homogeneous_solution, solve_block)
from pinchlab.exceptions import DomainError, HypothesisError, ResolutionError
from pinchlab.grids import radial_grid
from pinchlab.metrics import SymRadialTensor
from pinchlab.models import cusp_metric
from pinchlab.operators import linearized_einstein

from .conftest import compact_envelope, smooth_field

SQRT5 = math.sqrt(5.0)


def test_block_roots_exact():
    assert TRACE_BLOCK.roots == (1 - SQRT5, 1 + SQRT5)
    assert H33_BLOCK.roots == (1 - SQRT5, 1 + SQRT5)
    assert HI3_BLOCK.roots == (-1.0, 3.0)
    assert HIJ_BLOCK.roots == (0.0, 2.0)
    # cross-check against an independent polynomial root finder
    for block in BLOCKS.values():
        np_roots = sorted(np.roots([1.0, block.p, block.q]).real)
        assert np.allclose(np_roots, block.roots, atol=1e-12)


def test_trivial_variation_invariants():
    with pytest.raises(DomainError):
        TrivialEinsteinVariation(0.5, 0.0, 0.5)
    u = TrivialEinsteinVariation.from_offdiag(0.6, -0.1)
    assert u.norm() == pytest.approx(math.sqrt(2 * 0.36 + 2 * 0.01), rel=1e-12)
    r = radial_grid(-3, 3, 1e-3)
    met = cusp_metric(-3, 3, 1e-3)
    frame = u.as_tensor(r).frame_norm(met)
    assert np.max(np.abs(frame - u.norm())) < 1e-12  # constant frame norm


def test_assemble_trivial_variation_is_solution(cusp_window):
    u = TrivialEinsteinVariation.from_offdiag(0.7, -0.3)
    res = assemble_system(u.as_tensor(cusp_window.r), SymRadialTensor.zeros(cusp_window.r))
    assert res.max_residual() == 0.0


def test_assemble_cross_module(cusp_window, rng):
    h = smooth_field(cusp_window, rng, envelope=compact_envelope(cusp_window.r))
    f = linearized_einstein(h, cusp_window)
    res = assemble_system(h, f)
    assert res.max_residual() <= 1e-6


def test_assemble_trace_root(cusp_window):
    # pure-trace h with tr h = e^{(1+sqrt5) r} zeroes the trace residual
    r = cusp_window.r
    y = np.exp((1 + SQRT5) * r)
    from pinchlab.metrics import metric_as_tensor
    g = metric_as_tensor(cusp_window)
    u = y / 3.0
    h = SymRadialTensor(
        r, u[:, None, None] * g.comps,
        d_comps=((1 + SQRT5) * u)[:, None, None] * g.comps + u[:, None, None] * g.d_comps,
        d2_comps=((1 + SQRT5) ** 2 * u)[:, None, None] * g.comps
        + 2 * ((1 + SQRT5) * u)[:, None, None] * g.d_comps + u[:, None, None] * g.d2_comps)
    res = assemble_system(h, SymRadialTensor.zeros(r))
    scale = np.max(np.abs(y))
    assert np.max(np.abs(res.trace)) <= 1e-10 * scale


def test_assemble_hij_root_two(cusp_window):
    # h11 = 1 (coordinate constant): e^{2r} h11 = e^{2r} is the root-2 mode;
    # the hij residual must equal the compensation -2 (tr h - h33) exactly
    r = cusp_window.r
    ones = np.ones_like(r)
    h = SymRadialTensor.from_components(r, h11=ones,
                                        derivs={"h11": 0 * r}, derivs2={"h11": 0 * r})
    res = assemble_system(h, SymRadialTensor.zeros(r))
    expected = -2.0 * np.exp(2 * r)  # tr h - h33 = e^{2r} h11
    assert np.max(np.abs(res.h11 - expected)) <= 1e-8 * np.max(np.abs(expected))
    assert np.max(np.abs(res.h12)) == 0.0


def test_solve_block_homogeneous_exact():
    r = radial_grid(0.0, 10.0, 1e-3)
    y = solve_block(TRACE_BLOCK, r, np.zeros_like(r), 1.0, 1 - SQRT5)
    exact = np.exp((1 - SQRT5) * r)
    assert np.max(np.abs(y - exact) / exact) <= 1e-8


def test_solve_block_forced_particular():
    # forcing -2 e^{-r}: particular solution 2 e^{-r} since Q(-1) = -1;
    # substitution check plus short-window reproduction
    r = radial_grid(0.0, 2.0, 1e-3)
    candidate = 2 * np.exp(-r)
    subst = TRACE_BLOCK.apply(candidate, -candidate, candidate)
    assert np.max(np.abs(subst + 2 * np.exp(-r))) < 1e-12
    y = solve_block(TRACE_BLOCK, r, -2 * np.exp(-r), 2.0, -2.0)
    assert np.max(np.abs(y - candidate) / candidate) < 1e-10


def test_solve_block_zero_data():
    r = radial_grid(0.0, 5.0, 1e-3)
    y = solve_block(HIJ_BLOCK, r, np.zeros_like(r), 0.0, 0.0)
    assert np.max(np.abs(y)) == 0.0
    with pytest.raises(ResolutionError):
        solve_block(HIJ_BLOCK, np.array([0.0]), np.array([0.0]), 1.0, 0.0)


def test_fit_growth_exponent_pure_modes():
    r = radial_grid(0.0, 10.0, 1e-3)
    assert fit_growth_exponent(r, np.exp(3 * r)) == pytest.approx(3.0, abs=1e-3)
    y = homogeneous_solution(HI3_BLOCK, r, 0.5, 0.3)
    assert fit_growth_exponent(r, y, window=(7, 10)) == pytest.approx(3.0, abs=1e-2)
    hom = homogeneous_solution(HIJ_BLOCK, r, 0.4, 0.2)
    assert fit_growth_exponent(r, hom, window=(7, 10)) == pytest.approx(2.0, abs=1e-2)
    bounded = homogeneous_solution(HIJ_BLOCK, r, 0.4, 0.0)
    assert fit_growth_exponent(r, bounded, window=(5, 10)) == pytest.approx(0.0, abs=1e-2)


def test_fit_growth_exponent_sign_changes():
    r = radial_grid(0.0, 10.0, 1e-3)
    y = np.exp(1.5 * r) * np.sign(np.sin(0.5 * r) + 0.5)
    slope = fit_growth_exponent(r, y)
    assert slope == pytest.approx(1.5, abs=1e-2)


def test_classify_trivial_variation(cusp_window):
    r = radial_grid(-10.0, 10.0, 1e-3)
    u = TrivialEinsteinVariation.from_offdiag(0.5, 0.2)
    out = classify_bounded_solution(u.as_tensor(r), 0.5)
    assert out.accepted and not out.zero_certified
    assert out.variation.u11 == pytest.approx(0.5, abs=1e-10)
    assert out.variation.u12 == pytest.approx(0.2, abs=1e-10)
    assert out.remainder <= 1e-10
    # idempotence: classifying the projected variation returns it again
    again = classify_bounded_solution(out.variation.as_tensor(r), 0.5)
    assert again.variation.u11 == pytest.approx(out.variation.u11, rel=1e-12)


def test_classify_rejects_growing_mode():
    r = radial_grid(-10.0, 10.0, 1e-3)
    u = TrivialEinsteinVariation.from_offdiag(0.5, 0.2)
    # trace-free root-2 mode of the hij block: constant coordinate h11 = -h22
    zeros = np.zeros_like(r)
    mode = SymRadialTensor.from_components(
        r, h11=np.full_like(r, 1e-3), h22=np.full_like(r, -1e-3),
        derivs={"h11": zeros, "h22": zeros}, derivs2={"h11": zeros, "h22": zeros})
    out = classify_bounded_solution(u.as_tensor(r) + mode, 0.5)
    assert not out.accepted
    assert any(rate == 2.0 for _, rate, _ in out.rejected_modes)


def test_classify_small_decaying_mode_is_zero():
    # a decaying fundamental mode below tolerance certifies h ~ 0
    r = radial_grid(-10.0, 10.0, 1e-3)
    amp = 1e-9
    h13 = amp * np.exp(-2 * r)  # weighted e^r h13 = amp e^{-r}: the rate -1 mode
    h = SymRadialTensor.from_components(r, h13=h13,
                                        derivs={"h13": -2 * h13}, derivs2={"h13": 4 * h13})
    out = classify_bounded_solution(h, 0.5, remainder_tol=1e-4)
    assert out.accepted and out.zero_certified


def test_classify_requires_solution():
    r = radial_grid(-10.0, 10.0, 1e-3)
    h = SymRadialTensor.from_components(r, h33=np.sin(r))
    with pytest.raises(HypothesisError):
        classify_bounded_solution(h, 0.5)


def test_classify_window_length():
    r = radial_grid(-5.0, 5.0, 1e-3)
    u = TrivialEinsteinVariation.from_offdiag(0.5, 0.2)
    with pytest.raises(HypothesisError):
        classify_bounded_solution(u.as_tensor(r), 0.5)


def test_canonical_variation_projection(cusp_window, rng):
    met = cusp_window
    u = TrivialEinsteinVariation.from_offdiag(0.3, -0.4)
    got = canonical_variation(u.as_tensor(met.r), met, 0.0)
    assert got.u11 == pytest.approx(0.3, abs=1e-12)
    assert got.u12 == pytest.approx(-0.4, abs=1e-12)
    # pure trace projects to zero
    from pinchlab.metrics import metric_as_tensor
    g = metric_as_tensor(met)
    tr_dir = SymRadialTensor(met.r, np.exp(-met.r)[:, None, None] * g.comps)
    zero = canonical_variation(tr_dir, met, 0.0)
    assert zero.norm() <= 1e-12
    # linearity
    h1 = smooth_field(met, rng)
    h2 = smooth_field(met, rng)
    u1 = canonical_variation(h1, met, 1.0)
    u2 = canonical_variation(h2, met, 1.0)
    u12 = canonical_variation(h1 + h2, met, 1.0)
    assert u12.u11 == pytest.approx(u1.u11 + u2.u11, rel=1e-12, abs=1e-14)
    assert u12.u12 == pytest.approx(u1.u12 + u2.u12, rel=1e-12, abs=1e-14)


def test_canonical_variation_minimality(cusp_window, rng):
    met = cusp_window
    h = smooth_field(met, rng)
    c_r = 0.7
    u = canonical_variation(h, met, c_r)
    idx = int(np.argmin(np.abs(met.r - c_r)))
    gap_u = (h - u.as_tensor_for(met)).frame_norm(met)[idx]
    assert u.norm() <= h.frame_norm(met)[idx] + 1e-12
    for _ in range(1000):
        w = TrivialEinsteinVariation.from_offdiag(rng.normal(), rng.normal())
        gap_w = (h - w.as_tensor_for(met)).frame_norm(met)[idx]
        assert gap_u <= gap_w + 1e-12


def test_growth_bound_check_zero_and_pure_mode():
    r = radial_grid(0.0, 19.0, 1e-3)
    big_r = 20.0
    rep0 = growth_bound_check(r, np.zeros_like(r), HI3_BLOCK, [], np.zeros_like(r), 1.0, big_r)
    assert rep0.max_ratio == 0.0
    lam2, lam1 = HI3_BLOCK.roots
    y = np.exp(lam2 * r)
    rep = growth_bound_check(r, y, HI3_BLOCK, [], np.zeros_like(r), 1.0, big_r)
    assert rep.max_ratio <= 1.0 + 1e-9


def test_growth_bound_sweep_stable(rng):
    # randomized forcing under W(r) = e^{-lam r} + e^{lam (r-R)}: the max
    # ratio stays below one calibrated constant across the window sweep
    lam = 0.5
    worst = []
    for big_r in (10.0, 20.0, 40.0):
        r = radial_grid(0.0, big_r - 1.0, 1e-2)
        w_terms = [(1.0, -lam), (np.exp(-lam * big_r), lam)]
        envelope = np.exp(-lam * r) + np.exp(lam * (r - big_r))
        ratios = []
        for _ in range(20):
            forcing = rng.uniform(0.1, 1.0) * envelope * np.sin(rng.uniform(0.5, 2) * r)
            y = solve_block(HI3_BLOCK, r, forcing, rng.uniform(-0.2, 0.2), rng.uniform(-0.5, 0.5))
            # the equation is linear: rescale (y, forcing) together to |y| <= 1
            scale = max(1.0, 1.001 * float(np.max(np.abs(y))))
            rep = growth_bound_check(r, y / scale, HI3_BLOCK, w_terms,
                                     np.zeros_like(r), 0.0, big_r, forcing_slack_tol=2.0)
            ratios.append(rep.max_ratio)
        worst.append(max(ratios))
    assert max(worst) <= constants.GROWTH_BOUND_C
    assert max(worst) / min(worst) < 10.0  # stable across the sweep
