"""Kernel backend selection: numba JIT by default, pure numpy on request.

Set ``PINCHLAB_DISABLE_JIT=1`` to run all hot kernels as plain Python/numpy.
``PINCHLAB_THREADS`` caps the numba thread pool.
"""

import os

_DISABLE = os.environ.get("PINCHLAB_DISABLE_JIT", "0") not in ("0", "", "false", "False")

if not _DISABLE:
    try:
        import numba

        _threads = os.environ.get("PINCHLAB_THREADS")
        if _threads:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False
else:
    HAS_NUMBA = False

JIT_ENABLED = HAS_NUMBA and not _DISABLE


def maybe_jit(func):
    """Return an njit-compiled version of ``func``, or ``func`` itself if JIT is off.

    The undecorated function stays importable (``f.py_func`` when compiled,
    module-level ``*_py`` aliases otherwise), so benchmarks can compare paths.
    """
    if JIT_ENABLED:
        import numba

        return numba.njit(cache=True)(func)
    return func


def backend_name() -> str:
    return "numba" if JIT_ENABLED else "numpy"
