"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

The backend is chosen once at import time: numba is used when importable
unless the environment variable ``LEVSKETCH_BACKEND`` is set to ``numpy``.
Both paths perform the identical butterfly arithmetic in the identical
order, so results are bitwise equal.
"""

from __future__ import annotations

import os

import numpy as np

_REQUESTED = os.environ.get("LEVSKETCH_BACKEND", "numba").strip().lower()

# stay off TBB: version probing emits warnings on older installs
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap

    prange = range

USE_NUMBA = _HAVE_NUMBA and _REQUESTED != "numpy"


def _fwht_2d_numpy(a: np.ndarray) -> None:
    """Unnormalized in-place Walsh-Hadamard butterfly down axis 0."""
    n = a.shape[0]
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            lo = a[start : start + h]
            hi = a[start + h : start + 2 * h]
            t = lo - hi
            lo += hi
            hi[:] = t
        h *= 2


@njit(cache=True, parallel=True)
def _fwht_2d_numba(a):  # pragma: no cover - exercised via dispatch
    n, d = a.shape
    h = 1
    while h < n:
        step = 2 * h
        for b in prange(n // step):
            start = b * step
            for i in range(start, start + h):
                for j in range(d):
                    x = a[i, j]
                    y = a[i + h, j]
                    a[i, j] = x + y
                    a[i + h, j] = x - y
        h *= 2


@njit(cache=True, parallel=True)
def _row_sq_norms_numba(a):  # pragma: no cover - exercised via dispatch
    n, d = a.shape
    out = np.empty(n, dtype=np.float64)
    for i in prange(n):
        s = 0.0
        for j in range(d):
            s += a[i, j] * a[i, j]
        out[i] = s
    return out


def _row_sq_norms_numpy(a: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", a, a)


def fwht_inplace(a: np.ndarray) -> None:
    """Apply the unnormalized Hadamard butterfly to the rows axis of ``a``.

    ``a`` must be C-contiguous float64 with a power-of-two number of rows;
    callers are responsible for validation and for the 1/sqrt(n)
    normalization.
    """
    if USE_NUMBA:
        _fwht_2d_numba(a)
    else:
        _fwht_2d_numpy(a)


def row_sq_norms(a: np.ndarray) -> np.ndarray:
    """Squared euclidean norm of each row, accumulated in index order."""
    if USE_NUMBA:
        return _row_sq_norms_numba(np.ascontiguousarray(a))
    return _row_sq_norms_numpy(a)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
