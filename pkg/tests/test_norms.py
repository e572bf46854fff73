import numpy as np
import pytest

from pinchlab.cusp import TrivialEinsteinVariation
from pinchlab.exceptions import DomainError
from pinchlab.metrics import SymRadialTensor
from pinchlab.models import cusp_metric, hyperbolic_tube
from pinchlab.norms import (NormConfig, decomposition_norm, exponential_c0,
                            hybrid_norms, inverse_weight, set_e_membership)

from .conftest import smooth_field
from .oracles import weighted_integral_exact


def test_norm_config_validation():
    cfg = NormConfig()
    assert cfg.weight_rate == pytest.approx(2.0 - cfg.delta)
    for bad in (dict(delta=2.5), dict(r0=0.5), dict(lam=1.5), dict(b=0.5), dict(eta=1.0)):
        with pytest.raises(DomainError):
            NormConfig(**bad)


def test_zero_field_norms(cusp_one_sided):
    rep = hybrid_norms(SymRadialTensor.zeros(cusp_one_sided.r), cusp_one_sided, NormConfig())
    assert rep.sup_c0 == rep.sup_c1 == rep.sup_c2 == 0.0
    assert rep.hybrid_2 == rep.hybrid_0 == 0.0


def test_weighted_integral_closed_form(cusp_one_sided):
    # h = e^{-r} on a single frame component: |h|^2 = e^{-2r}, vol = e^{-2r}
    met = cusp_one_sided
    r = met.r
    cfg = NormConfig(delta=0.5)
    h = SymRadialTensor.from_components(r, h33=np.exp(-r))
    rep = hybrid_norms(h, met, cfg)
    rate = cfg.weight_rate
    for idx in (len(r) // 4, len(r) // 2, 3 * len(r) // 4):
        exact = weighted_integral_exact(rate, 4.0, r[0], r[-1], r[idx])
        assert rep.weighted_l2_h0[idx] ** 2 == pytest.approx(exact, rel=1e-6)


def test_set_e_membership(cusp_one_sided):
    # deep cusp basepoints see almost no annulus volume and land in E
    cfg = NormConfig(eps_bar=0.05)
    in_e = set_e_membership(cusp_one_sided, cfg)
    assert in_e[-1]
    # a fat flat window keeps its annulus volume above the cutoff
    from pinchlab.models import flat_product
    flat = flat_product(0.0, 8.0, 2e-3)
    in_e_flat = set_e_membership(flat, cfg)
    assert not in_e_flat[len(in_e_flat) // 2]


def test_norm_axioms(cusp_one_sided, rng):
    met = cusp_one_sided
    cfg = NormConfig()
    for _ in range(10):
        h1 = smooth_field(met, rng)
        h2 = smooth_field(met, rng)
        c = float(rng.uniform(0.2, 3.0))
        n1 = hybrid_norms(h1, met, cfg)
        n2 = hybrid_norms(h2, met, cfg)
        n_sum = hybrid_norms(h1 + h2, met, cfg)
        n_scaled = hybrid_norms(c * h1, met, cfg)
        for attr in ("hybrid_2", "hybrid_0", "sup_c0"):
            assert getattr(n_scaled, attr) == pytest.approx(c * getattr(n1, attr), rel=1e-10)
            assert getattr(n_sum, attr) <= getattr(n1, attr) + getattr(n2, attr) + 1e-10


def test_inverse_weight_shapes():
    cusp = cusp_metric(0.0, 6.0, 2e-3)
    w_cusp = inverse_weight(cusp, 0.5)
    assert w_cusp[0] == pytest.approx(1.0)
    assert w_cusp[-1] == pytest.approx(np.exp(-3.0), rel=1e-12)
    tube, _ = hyperbolic_tube(0.01, 6.0, step=2e-3)
    w_tube = inverse_weight(tube, 0.5)
    assert w_tube[0] == pytest.approx(1.0, abs=0.1)
    assert w_tube[-1] == pytest.approx(1.0, abs=0.1)
    mid = len(w_tube) // 2
    # minimum value 2 e^{-lam R / 2} sits mid-tube
    assert w_tube[mid] == pytest.approx(2 * np.exp(-0.5 * (6.0 - 0.1) / 2), rel=1e-3)
    assert np.all(w_tube <= 2.0)


def test_trivial_variation_norm_paths(cusp_one_sided):
    # constant sup norm, exploding exponential norm (flagged), finite
    # decomposition value |u|
    met = cusp_one_sided
    cfg = NormConfig()
    u = TrivialEinsteinVariation.from_offdiag(0.5, -0.2)
    rep = decomposition_norm(u.as_tensor(met.r), met, cfg)
    assert rep.exp_flagged
    assert rep.exp_c0 >= 0.9 * u.norm() * np.exp(cfg.lam * (met.r[-1] - 1 - met.r[0]))
    assert rep.decomposition_value == pytest.approx(u.norm(), rel=1e-6)
    assert rep.sup_c0 == pytest.approx(u.norm(), rel=1e-10)


def test_decomposition_of_decaying_field(cusp_one_sided):
    met = cusp_one_sided
    cfg = NormConfig()
    lam = cfg.lam
    h = SymRadialTensor.from_components(met.r, h33=np.exp(-lam * met.r))
    rep = decomposition_norm(h, met, cfg)
    assert rep.variation.norm() <= 1e-12
    assert rep.decomposition_value == pytest.approx(exponential_c0(h, met, lam), rel=1e-10)


def test_c0_bounded_by_twice_decomposition(cusp_one_sided, rng):
    met = cusp_one_sided
    cfg = NormConfig()
    for _ in range(50):
        h = smooth_field(met, rng)
        rep = decomposition_norm(h, met, cfg)
        assert rep.sup_c0 <= 2 * rep.decomposition_value + 1e-10
