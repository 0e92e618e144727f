"""Dense weight-assembly kernels.

The O(n^2) matrix fills are the hot loops of the package. Each kernel has
two implementations: a plain-loop version compiled with numba's @njit and
a vectorized numpy fallback. The active backend is chosen once, at import
time, from the FRACHAM_BACKEND environment variable:

    auto   (default) use numba when importable, else numpy
    numba  require numba, fail loudly if missing
    numpy  force the pure-numpy path

``benchmarks/bench_kernels.py`` times the two side by side.
"""

from __future__ import annotations

import os

import numpy as np


# ---------------------------------------------------------------------------
# loop kernels (numba-compilable, also runnable as plain python)
# ---------------------------------------------------------------------------

def _caputo_l1_loops(n, alpha, scale):
    # b_j = (j+1)^(1-alpha) - j^(1-alpha), the L1 convolution coefficients
    b = np.empty(n + 1)
    for j in range(n + 1):
        b[j] = (j + 1.0) ** (1.0 - alpha) - float(j) ** (1.0 - alpha)

    # first-difference form: y[i] = sum_k M[i-1, k] * (f[k+1] - f[k])
    m = np.zeros((n, n))
    for r in range(n):
        for k in range(r + 1):
            m[r, k] = scale * b[r - k]

    # nodal form: row sums telescope to zero, constants are annihilated
    w = np.zeros((n + 1, n + 1))
    for i in range(1, n + 1):
        w[i, 0] = -scale * b[i - 1]
        w[i, i] = scale * b[0]
        for j in range(1, i):
            w[i, j] = scale * (b[i - j] - b[i - j - 1])
    return w, m


def _int_weights_loops(n, mu, scale):
    # product-trapezoid convolution weights for the order-mu integral
    s = np.zeros(n + 1)
    for d in range(1, n + 1):
        fd = float(d)
        s[d] = (fd + 1.0) ** (mu + 1.0) + (fd - 1.0) ** (mu + 1.0) - 2.0 * fd ** (mu + 1.0)
    w = np.zeros((n + 1, n + 1))
    for i in range(1, n + 1):
        fi = float(i)
        w[i, 0] = scale * ((fi - 1.0) ** (mu + 1.0) - (fi - mu - 1.0) * fi ** mu)
        w[i, i] = scale
        for k in range(1, i):
            w[i, k] = scale * s[i - k]
    return w


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks
# ---------------------------------------------------------------------------

def _caputo_l1_numpy(n, alpha, scale):
    j = np.arange(n + 1, dtype=np.float64)
    b = (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)

    r = np.arange(n)
    lag = r[:, None] - r[None, :]
    m = np.where(lag >= 0, (scale * b)[np.abs(lag)], 0.0)

    e = np.empty(n + 1)
    e[0] = b[0]
    e[1:] = b[1:] - b[:-1]
    i = np.arange(n + 1)
    lag2 = i[:, None] - i[None, :]
    inner = (lag2 >= 0) & (i[None, :] >= 1)
    w = np.zeros((n + 1, n + 1))
    w[inner] = (scale * e)[lag2[inner]]
    w[1:, 0] = -scale * b[:n]
    return w, m


def _int_weights_numpy(n, mu, scale):
    d = np.arange(1, n + 1, dtype=np.float64)
    s = np.zeros(n + 1)
    s[1:] = (d + 1.0) ** (mu + 1.0) + (d - 1.0) ** (mu + 1.0) - 2.0 * d ** (mu + 1.0)

    i = np.arange(n + 1)
    lag = i[:, None] - i[None, :]
    inner = (lag >= 1) & (i[None, :] >= 1)
    w = np.zeros((n + 1, n + 1))
    w[inner] = s[lag[inner]]
    w[1:, 0] = (d - 1.0) ** (mu + 1.0) - (d - mu - 1.0) * d ** mu
    w[np.arange(1, n + 1), np.arange(1, n + 1)] = 1.0
    return scale * w


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_requested = os.environ.get("FRACHAM_BACKEND", "auto").strip().lower() or "auto"
if _requested not in ("auto", "numba", "numpy"):
    raise ImportError(
        f"FRACHAM_BACKEND={_requested!r} is not one of 'auto', 'numba', 'numpy'"
    )

_have_numba = False
if _requested != "numpy":
    try:
        from numba import njit

        _have_numba = True
    except ImportError:
        if _requested == "numba":
            raise

if _have_numba:
    caputo_l1 = njit(cache=True)(_caputo_l1_loops)
    int_weights = njit(cache=True)(_int_weights_loops)
    _BACKEND = "numba"
else:
    caputo_l1 = _caputo_l1_numpy
    int_weights = _int_weights_numpy
    _BACKEND = "numpy"


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return _BACKEND


def implementations():
    """All importable backends, keyed by name, for parity tests and benchmarks."""
    impls = {"numpy": (_caputo_l1_numpy, _int_weights_numpy)}
    try:
        from numba import njit as _njit

        impls["numba"] = (
            _njit(cache=True)(_caputo_l1_loops),
            _njit(cache=True)(_int_weights_loops),
        )
    except ImportError:
        pass
    return impls
