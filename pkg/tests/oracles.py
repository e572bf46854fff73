"""Independent brute-force oracles used by the tests.

Everything here is written as plain index loops straight from the defining
formulas, with its own finite differencing, so it shares no code path with
the vectorized implementations it checks.
"""

import numpy as np


def fd_riemann_frame(r, g_of_r, idx, h=1e-5):
    """Frame Riemann tensor at grid index from a metric callable g(r) -> (3,3).

    Central finite differences of the Christoffel symbols; returns
    Rm[mu, nu, sig, w] = <R(d_mu, d_nu) d_sig, d_w> converted to an
    orthonormal frame for diagonal metrics.
    """
    r0 = r[idx]

    def gamma(rv):
        g = g_of_r(rv)
        g_inv = np.linalg.inv(g)
        dg = (g_of_r(rv + h) - g_of_r(rv - h)) / (2 * h)
        out = np.zeros((3, 3, 3))
        for lam in range(3):
            for mu in range(3):
                for nu in range(3):
                    s = 0.0
                    for rho in range(3):
                        term = 0.0
                        if mu == 2:
                            term += dg[rho, nu]
                        if nu == 2:
                            term += dg[rho, mu]
                        if rho == 2:
                            term -= dg[mu, nu]
                        s += g_inv[lam, rho] * term
                    out[lam, mu, nu] = 0.5 * s
        return out

    gam = gamma(r0)
    dgam = (gamma(r0 + h) - gamma(r0 - h)) / (2 * h)
    rup = np.zeros((3, 3, 3, 3))  # R^rho_{sig mu nu}
    for rho in range(3):
        for sig in range(3):
            for mu in range(3):
                for nu in range(3):
                    val = 0.0
                    if mu == 2:
                        val += dgam[rho, nu, sig]
                    if nu == 2:
                        val -= dgam[rho, mu, sig]
                    for lam in range(3):
                        val += gam[rho, mu, lam] * gam[lam, nu, sig]
                        val -= gam[rho, nu, lam] * gam[lam, mu, sig]
                    rup[rho, sig, mu, nu] = val
    g = g_of_r(r0)
    rm = np.einsum("wr,rsmv->mvsw", g, rup)
    w = np.sqrt(np.diag(g))
    scale = np.einsum("m,v,s,w->mvsw", 1 / w, 1 / w, 1 / w, 1 / w)
    return rm * scale


def bianchi_dr_bruteforce(r, g_ref_of_r, t_of_r, idx, h=1e-5):
    """dr component of delta_ref(T) + 1/2 d tr_ref(T) by loops and FD."""
    r0 = r[idx]
    g = g_ref_of_r(r0)
    g_inv = np.linalg.inv(g)
    dg = (g_ref_of_r(r0 + h) - g_ref_of_r(r0 - h)) / (2 * h)
    dt = (t_of_r(r0 + h) - t_of_r(r0 - h)) / (2 * h)
    t = t_of_r(r0)

    gam = np.zeros((3, 3, 3))
    for lam in range(3):
        for mu in range(3):
            for nu in range(3):
                s = 0.0
                for rho in range(3):
                    term = 0.0
                    if mu == 2:
                        term += dg[rho, nu]
                    if nu == 2:
                        term += dg[rho, mu]
                    if rho == 2:
                        term -= dg[mu, nu]
                    s += g_inv[lam, rho] * term
                gam[lam, mu, nu] = 0.5 * s

    div = 0.0
    nu = 2  # dr component
    for mu in range(3):
        for lam in range(3):
            nabla = (dt[nu, lam] if mu == 2 else 0.0)
            for rho in range(3):
                nabla -= gam[rho, mu, nu] * t[rho, lam]
                nabla -= gam[rho, mu, lam] * t[nu, rho]
            div -= g_inv[mu, lam] * nabla

    g_inv_p = np.linalg.inv(g_ref_of_r(r0 + h))
    g_inv_m = np.linalg.inv(g_ref_of_r(r0 - h))
    tr_p = np.sum(g_inv_p * t_of_r(r0 + h))
    tr_m = np.sum(g_inv_m * t_of_r(r0 - h))
    dtr = (tr_p - tr_m) / (2 * h)
    return div + 0.5 * dtr


def weighted_integral_exact(rate, decay, r0, r1, rx):
    """int_{r0}^{r1} e^{-rate |r - rx|} e^{-decay r} dr in closed form."""

    def anti(lo, hi, a):
        # int e^{a r} dr on [lo, hi]
        if abs(a) < 1e-14:
            return hi - lo
        return (np.exp(a * hi) - np.exp(a * lo)) / a

    left = np.exp(-rate * rx) * anti(r0, min(rx, r1), rate - decay) if rx > r0 else 0.0
    right = np.exp(rate * rx) * anti(max(rx, r0), r1, -rate - decay) if rx < r1 else 0.0
    return left + right
