#!/usr/bin/env python3
"""Benchmark the JIT-compiled kernels against their pure-Python/numpy path.

The kernels are single-source: ``maybe_jit`` either compiles them or returns
the plain function, so the comparison below times the compiled wrapper
against the undecorated ``*_py`` reference on identical inputs.

Run:  python3 scripts/benchmark_backends.py
      PINCHLAB_DISABLE_JIT=1 pinchlab accept 1   # full fallback operation
"""

import time

import numpy as np

from pinchlab import kernels
from pinchlab.backend import JIT_ENABLED, backend_name


def timeit(fn, *args, repeat=5):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_lattice():
    args = (1e-3, 0.0, 0.0, 1.0, 1e-3, 0.1)
    kernels.count_lattice_points(*args)  # warm the compile
    t_jit, c1 = timeit(kernels.count_lattice_points, *args)
    t_py, c2 = timeit(kernels.count_lattice_points_py, *args)
    assert c1 == c2
    return "lattice point count", t_py, t_jit


def bench_exp_kernel():
    h = 1e-3
    r = np.arange(0.0, 20.0 + h / 2, h)
    f = np.exp(-0.5 * r) * np.sin(1.3 * r)
    kernels.exp_kernel_cumulative(f, h, -1.236)
    t_jit, a = timeit(kernels.exp_kernel_cumulative, f, h, -1.236)
    t_py, b = timeit(kernels.exp_kernel_cumulative_py, f, h, -1.236)
    assert np.allclose(a, b)
    return "variation-of-constants kernel", t_py, t_jit


def bench_rk45():
    t_eval = np.linspace(0.0, 10.0, 41)
    y0 = np.array([0.0, 1.0])
    a0 = np.array([[0.0, 1.0], [1.0, 0.0]])
    z = np.zeros((2, 2))
    args = (t_eval, y0, a0, z, z, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            np.zeros((0, 2)), np.zeros(0), 1e-12, 1e-12)
    kernels.rk45_linear(*args)
    t_jit, a = timeit(kernels.rk45_linear, *args, repeat=3)
    t_py, b = timeit(kernels.rk45_linear_py, *args, repeat=3)
    assert np.allclose(a, b)
    return "adaptive RK45 (Jacobi system)", t_py, t_jit


def main():
    print(f"active backend: {backend_name()} (JIT {'on' if JIT_ENABLED else 'off'})")
    print(f"{'kernel':34s} {'numpy/python':>14s} {'jit':>12s} {'speedup':>9s}")
    for bench in (bench_lattice, bench_exp_kernel, bench_rk45):
        name, t_py, t_jit = bench()
        print(f"{name:34s} {t_py * 1e3:11.3f} ms {t_jit * 1e3:9.3f} ms {t_py / t_jit:8.1f}x")
    if not JIT_ENABLED:
        print("note: JIT disabled; both columns run the interpreted path")


if __name__ == "__main__":
    main()
