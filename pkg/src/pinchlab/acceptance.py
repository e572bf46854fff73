"""The acceptance suite: one runner per numbered criterion.

Each runner returns a CriterionResult with per-claim records; the pytest
module and the ``accept`` CLI subcommand both drive these functions, so the
asserted tolerances live in exactly one place.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import constants
from .comparison import (compare_solutions,
                         gronwall_trajectory_check, jacobi_solve,
                         random_comparison_instance)
from .cusp import (BLOCKS, TrivialEinsteinVariation, fit_growth_exponent, solve_block)
from .grids import radial_grid, trapz
from .lattices import Lattice2D, bruteforce_count, lattice_preimage_count
from .metrics import SymRadialTensor, curvature_of_warped
from .models import (counterexample_metric, cusp_metric,
                     drilling_interpolation, exp_warp_metric,
                     filling_interpolation, flat_product, hyperbolic_tube,
                     pinching_sweep, sparsity_sum, weighted_ricci_deficit)
from .norms import NormConfig
from .operators import linearized_einstein
from .pointwise import (constant_curvature_tensor, random_curvature_tensor,
                        ric_pairing_bound, weitzenboeck)
from .reports import claim
from .solver import (LinearizedSolver, banach_iterate,
                     integral_inequality_checks, invert_linearized)
from .uniform import (associated_flat_metric, flat_torus_lambda1,
                      gauss_bonnet_defect, gauss_curvature,
                      manufactured_recovery_error, spectral_gap_bound)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    claims: list
    elapsed: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} ({self.name}): {status}  [{self.elapsed:.2f} s]"


def _finish(number, name, claims, t0):
    return CriterionResult(number, name, all(c["passed"] for c in claims),
                           claims, time.perf_counter() - t0)


# --------------------------------------------------------------------- 1


def criterion_1_constant_curvature(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    claims = []
    cases = [
        ("tube_sinh_cosh", lambda: hyperbolic_tube(0.01, 5.0, step=1e-3)[0], -1.0),
        ("cusp_exp", lambda: cusp_metric(0.0, 5.0, step=1e-3), -1.0),
        ("exp_half", lambda: exp_warp_metric(0.5, 1.0, 0.0, 5.0, step=1e-3), -1.0),
        ("flat_product", lambda: flat_product(0.0, 5.0, step=1e-3), 0.0),
    ]
    for name, build, kappa in cases:
        t_case = time.perf_counter()
        metric = build()
        dev = curvature_of_warped(metric, kappa).sup_sec_deviation(kappa)
        elapsed = time.perf_counter() - t_case
        claims.append(claim(f"curvature.constant.{name}", dev <= 1e-8,
                            value=dev, tolerance=1e-8))
        claims.append(claim(f"curvature.constant.{name}.runtime", elapsed < 1.0,
                            value=elapsed, tolerance=1.0))
    return _finish(1, "constant-curvature oracle", claims, t0)


# --------------------------------------------------------------------- 2


def criterion_2_pinching_decay(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    radii = [4.0, 5.0, 6.0, 7.0, 8.0]
    claims = []
    sups_d, slope_d, amp_d = pinching_sweep(lambda rr: drilling_interpolation(rr, step=1e-3), radii)
    claims.append(claim("pinching.drilling.slope", abs(slope_d + 2.0) <= 0.1,
                        value=slope_d, tolerance="-2.0 +/- 0.1",
                        amplitude=amp_d, sups=list(sups_d)))
    sups_f, slope_f, amp_f = pinching_sweep(lambda rr: filling_interpolation(rr, step=1e-3), radii)
    claims.append(claim("pinching.filling.slope", abs(slope_f + 2.0) <= 0.1,
                        value=slope_f, tolerance="-2.0 +/- 0.1",
                        amplitude=amp_f, sups=list(sups_f)))
    elapsed = time.perf_counter() - t0
    claims.append(claim("pinching.runtime", elapsed < 10.0, value=elapsed, tolerance=10.0))
    return _finish(2, "interpolation pinching decay", claims, t0)


# --------------------------------------------------------------------- 3


def criterion_3_ode_exponents(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    claims = []
    r = radial_grid(0.0, 10.0, 1e-3)
    rng = np.random.default_rng(seed + 3000)
    for tag, block in BLOCKS.items():
        lam2, lam1 = block.roots
        # dominant mode from generic data, subdominant from aligned data
        y_dom = solve_block(block, r, np.zeros_like(r), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))
        slope_dom = fit_growth_exponent(r, y_dom, window=(6.0, 10.0))
        claims.append(claim(f"ode.roots.{tag}.dominant", abs(slope_dom - lam1) <= 1e-2,
                            value=slope_dom, tolerance=f"{lam1} +/- 1e-2"))
        y_sub = solve_block(block, r, np.zeros_like(r), 1.0, lam2)
        slope_sub = fit_growth_exponent(r, y_sub, window=(6.0, 10.0))
        claims.append(claim(f"ode.roots.{tag}.subdominant", abs(slope_sub - lam2) <= 1e-2,
                            value=slope_sub, tolerance=f"{lam2} +/- 1e-2"))
    met = cusp_metric(-10.0, 10.0, 1e-3)
    u = TrivialEinsteinVariation.from_offdiag(0.8, -0.35)
    lu = linearized_einstein(u.as_tensor(met.r), met)
    sup = float(np.max(lu.frame_norm(met)))
    claims.append(claim("ode.trivial_variation.kernel", sup <= 1e-10,
                        value=sup, tolerance=1e-10))
    return _finish(3, "cusp ODE exponents", claims, t0)


# --------------------------------------------------------------------- 4


def criterion_4_algebraic_estimate(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 4000)
    violations = 0
    samples = 10_000
    for _ in range(samples):
        n = int(rng.integers(3, 6))
        kappa = float(rng.uniform(-2.0, 1.0))
        rm = constant_curvature_tensor(n, kappa) + random_curvature_tensor(n, rng, scale=rng.uniform(0.0, 0.5))
        h = rng.normal(size=(n, n))
        h = h + h.T
        lhs, rhs = ric_pairing_bound(h, rm, kappa)
        if lhs > rhs * (1 + 1e-12) + 1e-12:
            violations += 1
    claims = [claim("algebraic.pairing_bound", violations == 0,
                    value=violations, tolerance=0, samples=samples)]
    worst = 0.0
    for n in (3, 4, 5):
        rm = random_curvature_tensor(n, np.random.default_rng(seed + 4500 + n))
        w = weitzenboeck(np.eye(n), rm)
        worst = max(worst, float(np.max(np.abs(w.matrix))))
    claims.append(claim("algebraic.weitzenboeck_metric_zero", worst == 0.0,
                        value=worst, tolerance=0.0))
    return _finish(4, "algebraic curvature estimate", claims, t0)


# --------------------------------------------------------------------- 5


def criterion_5_comparison(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    claims = []
    rng = np.random.default_rng(seed + 5000)
    ratios = [gronwall_trajectory_check(np.random.default_rng(seed + 5000 + k)) for k in range(1000)]
    worst = max(ratios)
    claims.append(claim("comparison.gronwall", worst <= constants.GRONWALL_C * (1 + 1e-9),
                        value=worst, tolerance=constants.GRONWALL_C, samples=len(ratios)))

    worst_stab = 0.0
    eps_grid = [1e-1, 1e-2, 1e-3]
    t_grid = [5.0, 10.0, 20.0]
    for k in range(1000):
        r = np.random.default_rng(seed + 6000 + k)
        eps = eps_grid[k % 3]
        t_final = t_grid[(k // 3) % 3]
        sys, sys_bar, hyp = random_comparison_instance(r, eps, t_final)
        res = compare_solutions(sys, sys_bar, hyp, n_eval=41, envelope_samples=48)
        worst_stab = max(worst_stab, res.max_ratio)
    claims.append(claim("comparison.stability", worst_stab <= constants.STABILITY_C,
                        value=worst_stab, tolerance=constants.STABILITY_C, samples=1000))

    _, j_sinh, _ = jacobi_solve(-1.0, 0.0, 1.0, 5.0)
    _, j_cosh, _ = jacobi_solve(-1.0, 1.0, 0.0, 5.0)
    tt = np.linspace(0, 5.0, j_sinh.size)
    err = max(float(np.max(np.abs(j_sinh - np.sinh(tt)))),
              float(np.max(np.abs(j_cosh - np.cosh(tt)))))
    claims.append(claim("comparison.jacobi_closed_form", err <= 1e-8 * float(np.cosh(5.0)),
                        value=err, tolerance=1e-8, normalization="relative to cosh(5)"))
    return _finish(5, "ODE comparison lemmas", claims, t0)


# --------------------------------------------------------------------- 6


def criterion_6_fixed_point(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    claims = []
    out6 = None
    dists = []
    all_ratios = []
    radii = [4.0, 5.0, 6.0]
    for rr in radii:
        gbar = drilling_interpolation(rr, step=1e-3)
        out = banach_iterate(gbar, tol=1e-8)
        dists.append(out.c2_distance)
        all_ratios.extend(out.contraction_ratios)
        if rr == 6.0:
            out6 = out
    ratios_ok = all_ratios and all(x <= 0.5 for x in all_ratios)
    claims.append(claim("fixed_point.contraction", out6.converged and ratios_ok,
                        value=all_ratios, tolerance=0.5))
    claims.append(claim("fixed_point.final_pinching", out6.final_sec_deviation <= 1e-6,
                        value=out6.final_sec_deviation, tolerance=1e-6))
    slope = float(np.polyfit(radii, np.log(dists), 1)[0])
    claims.append(claim("fixed_point.c2_decay_slope", slope <= -1.8,
                        value=slope, tolerance="<= -1.8", distances=dists))
    elapsed = time.perf_counter() - t0
    claims.append(claim("fixed_point.runtime", elapsed < 60.0, value=elapsed, tolerance=60.0))
    return _finish(6, "Banach fixed point", claims, t0)


# --------------------------------------------------------------------- 7


def criterion_7_inversion(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 7000)
    met = cusp_metric(0.0, 8.0, 2e-3)
    solver = LinearizedSolver(met)
    cfg = NormConfig()
    r = met.r
    w = met.frame_weights()
    envelope = np.exp(-0.5 * r) * (1 - np.exp(-2 * r)) * (1 - np.exp(-2 * (r[-1] - r)))
    worst_res = 0.0
    worst_ratio = 0.0
    for _ in range(100):
        frame = np.zeros((r.size, 3, 3))
        for i in range(3):
            for j in range(i, 3):
                amp = rng.normal(size=2) * 0.3
                freq = rng.uniform(0.3, 2.0, size=2)
                phase = rng.uniform(0, 2 * np.pi, size=2)
                vals = envelope * sum(a * np.sin(fq * r + p) for a, fq, p in zip(amp, freq, phase))
                frame[:, i, j] = vals
                frame[:, j, i] = vals
        # decaying forcing means decaying frame components
        f = SymRadialTensor(r, frame * (w[:, :, None] * w[:, None, :]))
        res = invert_linearized(f, met, cfg=cfg, solver=solver)
        worst_res = max(worst_res, res.residual)
        worst_ratio = max(worst_ratio, res.norm_ratio)
    claims = [
        claim("inversion.residual", worst_res <= 1e-8, value=worst_res, tolerance=1e-8),
        claim("inversion.apriori_ratio", worst_ratio <= constants.APRIORI_C,
              value=worst_ratio, tolerance=constants.APRIORI_C, samples=100),
    ]
    return _finish(7, "inversion consistency", claims, t0)


# --------------------------------------------------------------------- 8


def criterion_8_integral_inequalities(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 8000)
    met = cusp_metric(0.0, 6.0, 2e-3)
    r = met.r
    w = met.frame_weights()
    min_rayleigh = np.inf
    min_margin = np.inf
    for _ in range(1000):
        centre = rng.uniform(1.5, 4.5)
        width = rng.uniform(0.5, 1.2)
        x = np.clip((r - centre + width) / (2 * width), 0.0, 1.0)
        bump = x**3 * (10 + x * (-15 + 6 * x))
        x2 = np.clip((centre + width - r) / (2 * width), 0.0, 1.0)
        bump = bump * (x2**3 * (10 + x2 * (-15 + 6 * x2)))
        frame = rng.normal(size=(3, 3))
        frame = frame + frame.T
        frame -= np.trace(frame) / 3 * np.eye(3)
        comps = bump[:, None, None] * frame[None] * (w[:, :, None] * w[:, None, :])
        h = SymRadialTensor(r, comps)
        rep = integral_inequality_checks(h, met)
        min_margin = min(min_margin, rep.first_inequality_margin)
        if rep.rayleigh is not None:
            min_rayleigh = min(min_rayleigh, rep.rayleigh)
    claims = [
        claim("integral.rayleigh", min_rayleigh >= 3.0 - 1e-3,
              value=float(min_rayleigh), tolerance="3 - 1e-3", samples=1000),
        claim("integral.first_inequality", min_margin >= -1e-8,
              value=float(min_margin), tolerance=-1e-8),
    ]
    return _finish(8, "Poincare/integral inequalities", claims, t0)


# --------------------------------------------------------------------- 9


def criterion_9_uniformization(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    claims = []
    lat = Lattice2D.square(1.0)
    n = 64
    x = np.linspace(0, 1, n, endpoint=False)
    x1, x2 = np.meshgrid(x, x, indexing="ij")

    rho_star = 0.05 * np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * x2)
    err, residual, _, _ = manufactured_recovery_error(lat, rho_star)
    claims.append(claim("uniformization.manufactured", err <= 1e-6, value=err, tolerance=1e-6))
    claims.append(claim("uniformization.residual", residual <= 1e-6, value=residual, tolerance=1e-6))

    worst_ratio = 0.0
    worst_gb = 0.0
    for amp in (0.1, 0.05, 0.01):
        rho = amp * (np.sin(2 * np.pi * x1) + 0.5 * np.cos(2 * np.pi * x2))
        _, grid = associated_flat_metric(rho, lat)
        k = gauss_curvature(grid)
        worst_ratio = max(worst_ratio, float(np.max(np.abs(grid.rho)) / np.max(np.abs(k))))
        worst_gb = max(worst_gb, abs(gauss_bonnet_defect(grid)))
    claims.append(claim("uniformization.ratio_bound", worst_ratio <= constants.UNIFORMIZATION_C,
                        value=worst_ratio, tolerance=constants.UNIFORMIZATION_C))
    claims.append(claim("uniformization.gauss_bonnet", worst_gb <= 1e-8,
                        value=worst_gb, tolerance=1e-8))

    rng = np.random.default_rng(seed + 9000)
    gap_ok = True
    worst_pair = None
    for _ in range(50):
        scale = rng.uniform(0.2, 1.2)
        skew = rng.uniform(-0.45, 0.45)
        aspect = rng.uniform(1.0, 2.5)
        lat_k = Lattice2D(np.array([scale, 0.0]),
                          np.array([skew * scale, aspect * scale])).reduced()
        lam1 = flat_torus_lambda1(lat_k)
        bound = spectral_gap_bound(lat_k.intrinsic_diameter, 2)
        if lam1 < bound:
            gap_ok = False
            worst_pair = (lam1, bound)
    claims.append(claim("uniformization.spectral_gap", gap_ok, value=worst_pair, samples=50))
    return _finish(9, "effective uniformization", claims, t0)


# --------------------------------------------------------------------- 10


def criterion_10_counting(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 10_000)
    worst_product = 0.0
    mismatches = 0
    exact_checked = 0
    for k in range(1000):
        s = rng.uniform(0.002, 0.1)
        lat = Lattice2D(np.array([s, 0.0]),
                        np.array([rng.uniform(-0.3, 0.3), rng.uniform(0.3, 1.5)]))
        radius = rng.uniform(0.0, constants.SMALL_PART_D)
        count, bound, _ = lattice_preimage_count(lat, radius)
        red = lat.reduced()
        worst_product = max(worst_product, count * red.injectivity_radius)
        if k % 16 == 0:
            span = int(radius / np.linalg.norm(red.v1)) + 2
            if bruteforce_count(red, radius, span=span) != count:
                mismatches += 1
            exact_checked += 1
    claims = [
        claim("counting.bruteforce_match", mismatches == 0,
              value=mismatches, samples=exact_checked),
        claim("counting.count_inj_bound", worst_product <= constants.PREIMAGE_C,
              value=worst_product, tolerance=constants.PREIMAGE_C, samples=1000),
    ]

    worst_gap = -np.inf
    violations = 0
    for k in range(1000):
        r = np.random.default_rng(seed + 11_000 + k)
        m = float(r.uniform(0.5, 3.0))
        kappa_p = float(r.uniform(0.1, 0.9))
        delta = float(r.uniform(0.05, 1.9 - kappa_p))
        n_dist = int(r.integers(1, 40))
        dists = []
        prev = 0.0
        for i in range(1, n_dist + 1):
            lo = max(prev, math.log(i / m) / kappa_p if i > m else 0.0)
            prev = lo + float(r.exponential(0.5)) + 1e-3
            dists.append(prev)
        total, bound = sparsity_sum(dists, delta, kappa_p, m)
        if total > bound * (1 + 1e-12):
            violations += 1
        worst_gap = max(worst_gap, total / bound if bound > 0 else 0.0)
    claims.append(claim("counting.sparsity_sum", violations == 0,
                        value=violations, worst_ratio=worst_gap, samples=1000))
    return _finish(10, "counting and sums", claims, t0)


# --------------------------------------------------------------------- 11


def criterion_11_obstruction(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    claims = []
    big_r, m, lam = 1.0, 2.0, 1.0
    eps_values = []
    deficit_log = []
    for delta in (0.04, 0.02, 0.01):
        metric, bump, _ = counterexample_metric(delta, big_r, m, step=1e-3)
        metric.check_invariants()
        curv = curvature_of_warped(metric)
        eps = curv.sup_sec_deviation(-1.0)
        eps_values.append(eps)
        stretch = metric.b[-1] / metric.a[-1]
        claims.append(claim(f"obstruction.stretch.delta={delta}",
                            abs(stretch - math.exp(big_r)) <= 1e-10 * math.exp(big_r),
                            value=float(stretch), tolerance=math.exp(big_r)))
        quad = float(trapz(bump(metric.r - m), metric.r))
        claims.append(claim(f"obstruction.bump_integral.delta={delta}",
                            abs(quad - big_r) <= 1e-6 * big_r, value=quad, tolerance=big_r))
        value, bound, _ = weighted_ricci_deficit(metric, lam)
        deficit_log.append({"delta": delta, "eps": eps, "value": value, "bound": bound})
        claims.append(claim(f"obstruction.weighted_deficit.delta={delta}", value <= bound,
                            value=value, tolerance=bound))
    claims.append(claim("obstruction.pinching_decreasing",
                        eps_values[0] > eps_values[1] > eps_values[2] > 0,
                        value=eps_values))
    ratio = deficit_log[1]["value"] / deficit_log[2]["value"]
    claims.append(claim("obstruction.quadratic_scaling", 3.3 <= ratio <= 4.7,
                        value=ratio, tolerance="about 4"))
    claims.append(claim("obstruction.regime_logged", True, value=deficit_log))
    return _finish(11, "deformation obstruction regime", claims, t0)


CRITERIA = {
    1: criterion_1_constant_curvature,
    2: criterion_2_pinching_decay,
    3: criterion_3_ode_exponents,
    4: criterion_4_algebraic_estimate,
    5: criterion_5_comparison,
    6: criterion_6_fixed_point,
    7: criterion_7_inversion,
    8: criterion_8_integral_inequalities,
    9: criterion_9_uniformization,
    10: criterion_10_counting,
    11: criterion_11_obstruction,
}


def run_criteria(numbers=None, seed: int = 0):
    numbers = sorted(CRITERIA) if numbers is None else sorted(numbers)
    return [CRITERIA[k](seed=seed) for k in numbers]
