"""Hot numerical kernels, JIT-compiled unless PINCHLAB_DISABLE_JIT is set.

Each kernel is a plain Python function over float64 scalars/arrays; the
``maybe_jit`` wrapper applies ``numba.njit`` when enabled.  Undecorated
``*_py`` references stay importable so the backend benchmark can compare
the interpreted and compiled paths.
"""

import math

import numpy as np

from .backend import maybe_jit


def _count_lattice_points(v1x, v1y, v2x, v2y, det, radius):
    m_max = int(radius * math.hypot(v2x, v2y) / det) + 1
    n_max = int(radius * math.hypot(v1x, v1y) / det) + 1
    r2 = radius * radius * (1.0 + 1e-12)
    count = 0
    for m in range(-m_max, m_max + 1):
        for n in range(-n_max, n_max + 1):
            px = m * v1x + n * v2x
            py = m * v1y + n * v2y
            if px * px + py * py <= r2:
                count += 1
    return count


count_lattice_points_py = _count_lattice_points
count_lattice_points = maybe_jit(_count_lattice_points)


def _exp_moments(lam, h):
    """M_j = int_0^h e^{lam (h-u)} u^j du for j = 0..3."""
    if abs(lam) < 1e-13:
        return h, h * h / 2.0, h**3 / 3.0, h**4 / 4.0
    e = math.exp(lam * h)
    m0 = (e - 1.0) / lam
    m1 = (m0 - h) / lam
    m2 = (2.0 * m1 - h * h) / lam
    m3 = (3.0 * m2 - h**3) / lam
    return m0, m1, m2, m3


exp_moments = maybe_jit(_exp_moments)


def _exp_kernel_cumulative(f, h, lam):
    """I[k] = int_{r0}^{r_k} e^{lam (r_k - s)} f(s) ds, cubic-exact per step.

    f is modelled per step by the cubic through the four nearest samples, the
    kernel-weighted step integrals use closed-form moments, and the recursion
    I_{k+1} = e^{lam h} I_k + local keeps the cost linear in the grid size.
    """
    n = f.shape[0]
    out = np.zeros(n)
    if n < 4:
        return out
    m0, m1, m2, m3 = exp_moments(lam, h)
    grow = math.exp(lam * h)
    acc = 0.0
    for k in range(n - 1):
        if k == 0:
            f0, f1, f2, f3 = f[0], f[1], f[2], f[3]
            c0 = f0
            c1 = (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * h)
            c2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (2.0 * h * h)
            c3 = (-f0 + 3.0 * f1 - 3.0 * f2 + f3) / (6.0 * h**3)
        elif k == n - 2:
            fm2, fm1, f0, f1 = f[k - 2], f[k - 1], f[k], f[k + 1]
            c0 = f0
            c1 = (fm2 - 6.0 * fm1 + 3.0 * f0 + 2.0 * f1) / (6.0 * h)
            c2 = (fm1 - 2.0 * f0 + f1) / (2.0 * h * h)
            c3 = (-fm2 + 3.0 * fm1 - 3.0 * f0 + f1) / (6.0 * h**3)
        else:
            fm1, f0, f1, f2 = f[k - 1], f[k], f[k + 1], f[k + 2]
            c0 = f0
            c1 = (-2.0 * fm1 - 3.0 * f0 + 6.0 * f1 - f2) / (6.0 * h)
            c2 = (fm1 - 2.0 * f0 + f1) / (2.0 * h * h)
            c3 = (-fm1 + 3.0 * f0 - 3.0 * f1 + f2) / (6.0 * h**3)
        local = c0 * m0 + c1 * m1 + c2 * m2 + c3 * m3
        acc = acc * grow + local
        out[k + 1] = acc
    return out


exp_kernel_cumulative_py = _exp_kernel_cumulative
exp_kernel_cumulative = maybe_jit(_exp_kernel_cumulative)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) for parametric linear systems
#
# y' = A(t) y + b(t),
# A(t) = A0 + c_exp e^{eta (t - t_ref)} A1 + c_trig sin(omega t + phase) A2,
# b(t) = sum_k e^{mu_k t} B[k].


def _rhs_linear(t, y, a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase,
                b_vecs, b_rates):
    out = a0 @ y
    if c_exp != 0.0:
        out = out + (c_exp * math.exp(eta * (t - t_ref))) * (a1 @ y)
    if c_trig != 0.0:
        out = out + (c_trig * math.sin(omega * t + phase)) * (a2 @ y)
    for k in range(b_rates.shape[0]):
        out = out + math.exp(b_rates[k] * t) * b_vecs[k]
    return out


rhs_linear = maybe_jit(_rhs_linear)


def _rk45_linear(t_eval, y0, a0, a1, a2, c_exp, eta, t_ref, c_trig, omega,
                 phase, b_vecs, b_rates, atol, rtol):
    """Adaptive Dormand-Prince integration reporting y at the t_eval points."""
    n_out = t_eval.shape[0]
    dim = y0.shape[0]
    out = np.zeros((n_out, dim))
    out[0] = y0
    t = t_eval[0]
    y = y0.copy()
    h = min(1e-3, (t_eval[-1] - t_eval[0]) / 10.0)
    idx = 1
    k1 = rhs_linear(t, y, a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase, b_vecs, b_rates)
    for _ in range(4_000_000):
        if idx >= n_out:
            break
        target = t_eval[idx]
        hitting = t + h >= target
        h_step = target - t if hitting else h
        if h_step <= 1e-15 * max(1.0, abs(t)):
            t = target
            out[idx] = y
            idx += 1
            continue
        k2 = rhs_linear(t + h_step / 5.0, y + h_step * (k1 / 5.0),
                        a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase, b_vecs, b_rates)
        k3 = rhs_linear(t + 3.0 * h_step / 10.0, y + h_step * (3.0 * k1 / 40.0 + 9.0 * k2 / 40.0),
                        a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase, b_vecs, b_rates)
        k4 = rhs_linear(t + 4.0 * h_step / 5.0,
                        y + h_step * (44.0 * k1 / 45.0 - 56.0 * k2 / 15.0 + 32.0 * k3 / 9.0),
                        a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase, b_vecs, b_rates)
        k5 = rhs_linear(t + 8.0 * h_step / 9.0,
                        y + h_step * (19372.0 * k1 / 6561.0 - 25360.0 * k2 / 2187.0
                                      + 64448.0 * k3 / 6561.0 - 212.0 * k4 / 729.0),
                        a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase, b_vecs, b_rates)
        k6 = rhs_linear(t + h_step,
                        y + h_step * (9017.0 * k1 / 3168.0 - 355.0 * k2 / 33.0
                                      + 46732.0 * k3 / 5247.0 + 49.0 * k4 / 176.0
                                      - 5103.0 * k5 / 18656.0),
                        a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase, b_vecs, b_rates)
        y5 = y + h_step * (35.0 * k1 / 384.0 + 500.0 * k3 / 1113.0 + 125.0 * k4 / 192.0
                           - 2187.0 * k5 / 6784.0 + 11.0 * k6 / 84.0)
        k7 = rhs_linear(t + h_step, y5,
                        a0, a1, a2, c_exp, eta, t_ref, c_trig, omega, phase, b_vecs, b_rates)
        y4 = y + h_step * (5179.0 * k1 / 57600.0 + 7571.0 * k3 / 16695.0 + 393.0 * k4 / 640.0
                           - 92097.0 * k5 / 339200.0 + 187.0 * k6 / 2100.0 + k7 / 40.0)
        err = 0.0
        for i in range(dim):
            sc = atol + rtol * max(abs(y[i]), abs(y5[i]))
            e = abs(y5[i] - y4[i]) / sc
            if e > err:
                err = e
        if err <= 1.0:
            t = t + h_step
            y = y5
            k1 = k7
            if hitting:
                out[idx] = y
                idx += 1
        if err > 0.0:
            fac = 0.9 * err ** (-0.2)
            if fac < 0.2:
                fac = 0.2
            elif fac > 5.0:
                fac = 5.0
            h = h_step * fac
        else:
            h = h_step * 5.0
    return out


rk45_linear_py = _rk45_linear
rk45_linear = maybe_jit(_rk45_linear)


def _hermite_eval(t, ts0, hs, rs, slopes):
    n_s = rs.shape[0]
    if t <= ts0:
        return rs[0]
    tmax = ts0 + hs * (n_s - 1)
    if t >= tmax:
        return rs[n_s - 1]
    i = int((t - ts0) / hs)
    if i > n_s - 2:
        i = n_s - 2
    u = (t - (ts0 + i * hs)) / hs
    h00 = (1.0 + 2.0 * u) * (1.0 - u) ** 2
    h10 = u * (1.0 - u) ** 2
    h01 = u * u * (3.0 - 2.0 * u)
    h11 = u * u * (u - 1.0)
    return h00 * rs[i] + h10 * hs * slopes[i] + h01 * rs[i + 1] + h11 * hs * slopes[i + 1]


hermite_eval = maybe_jit(_hermite_eval)


def _rhs_jacobi(t, y, ts0, hs, rs, slopes):
    return np.array([y[1], -hermite_eval(t, ts0, hs, rs, slopes) * y[0]])


rhs_jacobi = maybe_jit(_rhs_jacobi)


def _rk45_jacobi_sampled(t_eval, j0, dj0, ts, rs, atol, rtol):
    """J'' + R(t) J = 0 with R given by uniform samples (cubic Hermite)."""
    n_s = ts.shape[0]
    hs = ts[1] - ts[0]
    ts0 = ts[0]
    slopes = np.empty(n_s)
    for i in range(1, n_s - 1):
        slopes[i] = (rs[i + 1] - rs[i - 1]) / (2.0 * hs)
    slopes[0] = (rs[1] - rs[0]) / hs
    slopes[n_s - 1] = (rs[n_s - 1] - rs[n_s - 2]) / hs

    n_out = t_eval.shape[0]
    out = np.zeros((n_out, 2))
    out[0, 0] = j0
    out[0, 1] = dj0
    t = t_eval[0]
    y = np.array([j0, dj0])
    h = 1e-3
    idx = 1
    k1 = rhs_jacobi(t, y, ts0, hs, rs, slopes)
    for _ in range(4_000_000):
        if idx >= n_out:
            break
        target = t_eval[idx]
        hitting = t + h >= target
        h_step = target - t if hitting else h
        if h_step <= 1e-15 * max(1.0, abs(t)):
            t = target
            out[idx, 0] = y[0]
            out[idx, 1] = y[1]
            idx += 1
            continue
        k2 = rhs_jacobi(t + h_step / 5.0, y + h_step * (k1 / 5.0), ts0, hs, rs, slopes)
        k3 = rhs_jacobi(t + 3.0 * h_step / 10.0, y + h_step * (3.0 * k1 / 40.0 + 9.0 * k2 / 40.0),
                        ts0, hs, rs, slopes)
        k4 = rhs_jacobi(t + 4.0 * h_step / 5.0,
                        y + h_step * (44.0 * k1 / 45.0 - 56.0 * k2 / 15.0 + 32.0 * k3 / 9.0),
                        ts0, hs, rs, slopes)
        k5 = rhs_jacobi(t + 8.0 * h_step / 9.0,
                        y + h_step * (19372.0 * k1 / 6561.0 - 25360.0 * k2 / 2187.0
                                      + 64448.0 * k3 / 6561.0 - 212.0 * k4 / 729.0),
                        ts0, hs, rs, slopes)
        k6 = rhs_jacobi(t + h_step,
                        y + h_step * (9017.0 * k1 / 3168.0 - 355.0 * k2 / 33.0
                                      + 46732.0 * k3 / 5247.0 + 49.0 * k4 / 176.0
                                      - 5103.0 * k5 / 18656.0),
                        ts0, hs, rs, slopes)
        y5 = y + h_step * (35.0 * k1 / 384.0 + 500.0 * k3 / 1113.0 + 125.0 * k4 / 192.0
                           - 2187.0 * k5 / 6784.0 + 11.0 * k6 / 84.0)
        k7 = rhs_jacobi(t + h_step, y5, ts0, hs, rs, slopes)
        y4 = y + h_step * (5179.0 * k1 / 57600.0 + 7571.0 * k3 / 16695.0 + 393.0 * k4 / 640.0
                           - 92097.0 * k5 / 339200.0 + 187.0 * k6 / 2100.0 + k7 / 40.0)
        err = 0.0
        for i in range(2):
            sc = atol + rtol * max(abs(y[i]), abs(y5[i]))
            e = abs(y5[i] - y4[i]) / sc
            if e > err:
                err = e
        if err <= 1.0:
            t = t + h_step
            y = y5
            k1 = k7
            if hitting:
                out[idx, 0] = y[0]
                out[idx, 1] = y[1]
                idx += 1
        if err > 0.0:
            fac = 0.9 * err ** (-0.2)
            if fac < 0.2:
                fac = 0.2
            elif fac > 5.0:
                fac = 5.0
            h = h_step * fac
        else:
            h = h_step * 5.0
    return out


rk45_jacobi_sampled_py = _rk45_jacobi_sampled
rk45_jacobi_sampled = maybe_jit(_rk45_jacobi_sampled)


def _power_iteration_opnorm(mat, tol, max_iter):
    """Operator norm via power iteration on A^T A."""
    n = mat.shape[1]
    v = np.ones(n) / math.sqrt(n)
    ata = mat.T @ mat
    lam = 0.0
    for _ in range(max_iter):
        w = ata @ v
        norm = math.sqrt(float(w @ w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        new_lam = float(v @ (ata @ v))
        if abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            lam = new_lam
            break
        lam = new_lam
    return math.sqrt(max(lam, 0.0))


power_iteration_opnorm_py = _power_iteration_opnorm
power_iteration_opnorm = maybe_jit(_power_iteration_opnorm)
