"""Quantitative ODE comparison toolkit: the Gronwall-type envelope bound,
the two-system stability estimate, and Jacobi-field solves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .exceptions import HypothesisError
from .kernels import power_iteration_opnorm, rk45_jacobi_sampled, rk45_linear

ATOL = 1e-12
RTOL = 1e-12


def batched_opnorm(mats: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Operator norms of a stack of matrices by power iteration on A^T A."""
    ata = np.einsum("sji,sjk->sik", mats, mats)
    s, n = mats.shape[0], mats.shape[1]
    v = np.ones((s, n)) / math.sqrt(n)
    lam = np.zeros(s)
    for _ in range(max_iter):
        w = np.einsum("sik,sk->si", ata, v)
        norm = np.linalg.norm(w, axis=1)
        norm[norm == 0.0] = 1.0
        v = w / norm[:, None]
        new_lam = np.einsum("si,sik,sk->s", v, ata, v)
        if np.all(np.abs(new_lam - lam) <= tol * np.maximum(1.0, np.abs(new_lam))):
            lam = new_lam
            break
        lam = new_lam
    return np.sqrt(np.maximum(lam, 0.0))


@dataclass
class LinearSystem:
    """y' = A(t) y + b(t) with parametric time dependence.

    A(t) = A0 + c_exp e^{eta (t - t_ref)} A1 + c_trig sin(omega t + phase) A2;
    b(t) = sum_k e^{rate_k t} vec_k.
    """

    y0: np.ndarray
    a0: np.ndarray
    a1: np.ndarray | None = None
    c_exp: float = 0.0
    eta: float = 0.0
    t_ref: float = 0.0
    a2: np.ndarray | None = None
    c_trig: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    forcing_vecs: np.ndarray | None = None  # (m, n)
    forcing_rates: np.ndarray | None = None  # (m,)

    def __post_init__(self):
        self.y0 = np.asarray(self.y0, dtype=float)
        self.a0 = np.asarray(self.a0, dtype=float)
        n = self.y0.size
        if self.a1 is None:
            self.a1 = np.zeros((n, n))
        if self.a2 is None:
            self.a2 = np.zeros((n, n))
        if self.forcing_vecs is None:
            self.forcing_vecs = np.zeros((0, n))
            self.forcing_rates = np.zeros(0)
        self.a1 = np.asarray(self.a1, dtype=float)
        self.a2 = np.asarray(self.a2, dtype=float)
        self.forcing_vecs = np.asarray(self.forcing_vecs, dtype=float).reshape(-1, n)
        self.forcing_rates = np.asarray(self.forcing_rates, dtype=float)

    @property
    def dim(self) -> int:
        return self.y0.size

    def matrix_at(self, t: float) -> np.ndarray:
        m = self.a0.copy()
        if self.c_exp:
            m = m + self.c_exp * math.exp(self.eta * (t - self.t_ref)) * self.a1
        if self.c_trig:
            m = m + self.c_trig * math.sin(self.omega * t + self.phase) * self.a2
        return m

    def forcing_at(self, t: float) -> np.ndarray:
        out = np.zeros(self.dim)
        for vec, rate in zip(self.forcing_vecs, self.forcing_rates):
            out = out + math.exp(rate * t) * vec
        return out

    def matrices_at(self, ts: np.ndarray) -> np.ndarray:
        """(S, n, n) stack of A(t) over sample times."""
        ts = np.asarray(ts, dtype=float)
        m = np.broadcast_to(self.a0, (ts.size,) + self.a0.shape).copy()
        if self.c_exp:
            m += (self.c_exp * np.exp(self.eta * (ts - self.t_ref)))[:, None, None] * self.a1
        if self.c_trig:
            m += (self.c_trig * np.sin(self.omega * ts + self.phase))[:, None, None] * self.a2
        return m

    def forcings_at(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.zeros((ts.size, self.dim))
        for vec, rate in zip(self.forcing_vecs, self.forcing_rates):
            out += np.exp(rate * ts)[:, None] * vec
        return out

    def opnorm_envelope(self, t_max: float, samples: int = 256) -> float:
        """sup_t ||A(t)||_op on [0, t_max], by power iteration at sample times."""
        ts = np.linspace(0.0, t_max, samples)
        return float(np.max(batched_opnorm(self.matrices_at(ts))))

    def integrate(self, t_eval: np.ndarray) -> np.ndarray:
        t_eval = np.asarray(t_eval, dtype=float)
        return rk45_linear(t_eval, self.y0, self.a0, self.a1, self.a2,
                           self.c_exp, self.eta, self.t_ref,
                           self.c_trig, self.omega, self.phase,
                           self.forcing_vecs, self.forcing_rates, ATOL, RTOL)


def gronwall_bound(chi0: float, sigma: float, terms, t) -> np.ndarray | float:
    """|chi(0)| e^{sigma t} + sum_i (lam_i - sigma)^{-1} kappa_i e^{lam_i t}.

    Valid whenever ||A(t)||_op <= sigma and |forcing| <= sum kappa_i e^{lam_i t}
    with every lam_i > sigma.
    """
    t = np.asarray(t, dtype=float)
    out = abs(chi0) * np.exp(sigma * t)
    for kappa, lam in terms:
        if lam <= sigma:
            raise HypothesisError(f"forcing rate {lam} must exceed the operator envelope {sigma}")
        if kappa < 0:
            raise HypothesisError("forcing amplitudes must be nonnegative")
        out = out + kappa / (lam - sigma) * np.exp(lam * t)
    return out if out.ndim else float(out)


@dataclass
class ComparisonHypothesis:
    """Envelope data of the two-system stability estimate."""

    eps: float
    eta: float
    beta_bar: float
    mu_bar: float
    beta: float
    mu: float
    t_final: float


@dataclass
class ComparisonResult:
    t: np.ndarray
    diff: np.ndarray
    bound: np.ndarray
    max_ratio: float
    a: float
    a_bar: float


def compare_solutions(sys: LinearSystem, sys_bar: LinearSystem,
                      hyp: ComparisonHypothesis, n_eval: int = 201,
                      envelope_samples: int = 128) -> ComparisonResult:
    """Integrate both systems and compare |y - y_bar| with the explicit bound

    |y0_bar - y0| e^{a t} + eps |y0_bar| e^{a_bar t} e^{eta (t-T)}
      + eps beta_bar e^{mu_bar t} e^{eta (t-T)} + beta e^{mu t}.
    """
    if sys.dim != sys_bar.dim:
        raise HypothesisError("systems must share the phase-space dimension")
    t_final = hyp.t_final
    a = max(sys.opnorm_envelope(t_final, envelope_samples), 1e-12)
    a_bar = max(sys_bar.opnorm_envelope(t_final, envelope_samples), 1e-12)
    if hyp.eta <= a - a_bar:
        raise HypothesisError(f"requires eta > a - a_bar = {a - a_bar:.4f}")
    if hyp.mu_bar <= max(a, a_bar) or hyp.mu <= a:
        raise HypothesisError("forcing envelope rates must exceed the operator envelopes")

    ts = np.linspace(0.0, t_final, envelope_samples)
    slack = 1 + 1e-6
    gaps = batched_opnorm(sys.matrices_at(ts) - sys_bar.matrices_at(ts))
    if np.any(gaps > slack * hyp.eps * np.exp(hyp.eta * (ts - t_final)) + 1e-14):
        raise HypothesisError("||A - A_bar|| exceeds its envelope")
    if np.any(np.linalg.norm(sys_bar.forcings_at(ts), axis=1)
              > slack * hyp.beta_bar * np.exp(hyp.mu_bar * ts) + 1e-14):
        raise HypothesisError("|b_bar| exceeds its envelope")
    if np.any(np.linalg.norm(sys.forcings_at(ts) - sys_bar.forcings_at(ts), axis=1)
              > slack * hyp.beta * np.exp(hyp.mu * ts) + 1e-14):
        raise HypothesisError("|b - b_bar| exceeds its envelope")

    t_eval = np.linspace(0.0, t_final, n_eval)
    y = sys.integrate(t_eval)
    y_bar = sys_bar.integrate(t_eval)
    diff = np.linalg.norm(y - y_bar, axis=1)
    y0_gap = float(np.linalg.norm(sys_bar.y0 - sys.y0))
    y0_bar = float(np.linalg.norm(sys_bar.y0))
    bound = (y0_gap * np.exp(a * t_eval)
             + hyp.eps * y0_bar * np.exp(a_bar * t_eval) * np.exp(hyp.eta * (t_eval - t_final))
             + hyp.eps * hyp.beta_bar * np.exp(hyp.mu_bar * t_eval) * np.exp(hyp.eta * (t_eval - t_final))
             + hyp.beta * np.exp(hyp.mu * t_eval))
    safe = bound > 1e-290
    ratio = np.zeros_like(diff)
    ratio[safe] = diff[safe] / bound[safe]
    if np.any(~safe) and np.any(diff[~safe] > 1e-280):
        raise HypothesisError("nonzero difference against an identically zero bound")
    return ComparisonResult(t_eval, diff, bound, float(np.max(ratio)), a, a_bar)


def jacobi_solve(curvature, j0: float, dj0: float, t_final: float,
                 n_eval: int = 501):
    """Solve J'' + R(t) J = 0 as a first-order system.

    ``curvature`` is a constant, a tuple (R0, c, eta, t_ref) encoding
    R(t) = R0 + c e^{eta (t - t_ref)}, or a pair of sample arrays (ts, Rs).
    Returns (t, J, J').
    """
    t_eval = np.linspace(0.0, t_final, n_eval)
    if isinstance(curvature, (int, float)):
        curvature = (float(curvature), 0.0, 0.0, 0.0)
    if isinstance(curvature, tuple) and len(curvature) == 4 and np.isscalar(curvature[0]):
        r0, c, eta, t_ref = curvature
        a0 = np.array([[0.0, 1.0], [-r0, 0.0]])
        a1 = np.array([[0.0, 0.0], [-1.0, 0.0]])
        sys = LinearSystem(np.array([j0, dj0]), a0, a1=a1, c_exp=c, eta=eta, t_ref=t_ref)
        out = sys.integrate(t_eval)
    else:
        ts, rs = curvature
        out = rk45_jacobi_sampled(t_eval, float(j0), float(dj0),
                                  np.asarray(ts, float), np.asarray(rs, float), ATOL, RTOL)
    return t_eval, out[:, 0], out[:, 1]


# ---------------------------------------------------------------------------
# randomized instance generators used by the property checks


def random_stable_instance(rng: np.random.Generator, dim: int = 3,
                           t_final: float = 4.0):
    """A random system with known envelope data for the Gronwall check."""
    base = rng.normal(size=(dim, dim))
    a0 = base / max(1.0, np.linalg.norm(base, 2)) * rng.uniform(0.2, 1.5)
    a2 = rng.normal(size=(dim, dim))
    a2 /= max(1.0, np.linalg.norm(a2, 2))
    c_trig = rng.uniform(0.0, 0.5)
    omega = rng.uniform(0.3, 3.0)
    m = rng.integers(1, 3)
    vecs = rng.normal(size=(m, dim))
    sigma_guess = np.linalg.norm(a0, 2) + c_trig
    rates = sigma_guess + rng.uniform(0.1, 1.5, size=m)
    y0 = rng.normal(size=dim)
    sys = LinearSystem(y0, a0, a2=a2, c_trig=c_trig, omega=omega, phase=rng.uniform(0, 2 * np.pi),
                       forcing_vecs=vecs, forcing_rates=rates)
    sigma = sys.opnorm_envelope(t_final)
    terms = [(float(np.linalg.norm(v)), float(rate)) for v, rate in zip(vecs, rates)]
    return sys, sigma, terms


def gronwall_trajectory_check(rng: np.random.Generator, t_final: float = 4.0,
                              n_eval: int = 81):
    """One randomized instance: returns (max |chi|(t) / bound(t))."""
    sys, sigma, terms = random_stable_instance(rng, t_final=t_final)
    t_eval = np.linspace(0.0, t_final, n_eval)
    traj = np.linalg.norm(sys.integrate(t_eval), axis=1)
    bound = gronwall_bound(float(np.linalg.norm(sys.y0)), sigma, terms, t_eval)
    return float(np.max(traj / bound))


def random_comparison_instance(rng: np.random.Generator, eps: float, t_final: float,
                               dim: int = 3, eta: float = 2.5):
    """Perturbed-vs-reference pair satisfying the stability-lemma hypotheses."""
    base = rng.normal(size=(dim, dim))
    a0 = base / max(1.0, np.linalg.norm(base, 2))
    pert = rng.normal(size=(dim, dim))
    pert /= np.linalg.norm(pert, 2)
    y0_bar = rng.normal(size=dim)
    y0 = y0_bar + rng.normal(size=dim) * 0.01
    m = rng.integers(1, 3)
    vecs = rng.normal(size=(m, dim)) * 0.5
    rates = 2.0 + rng.uniform(0.1, 1.0, size=m)
    sys_bar = LinearSystem(y0_bar, a0, forcing_vecs=vecs, forcing_rates=rates)
    sys = LinearSystem(y0, a0, a1=pert, c_exp=eps, eta=eta, t_ref=t_final,
                       forcing_vecs=vecs, forcing_rates=rates)
    beta_bar = float(np.sum([np.linalg.norm(v) for v in vecs]))
    mu_bar = float(np.max(rates))
    hyp = ComparisonHypothesis(eps=eps, eta=eta, beta_bar=beta_bar, mu_bar=mu_bar,
                               beta=0.0, mu=mu_bar + 0.5, t_final=t_final)
    return sys, sys_bar, hyp
