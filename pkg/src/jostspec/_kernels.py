"""Site-level numeric kernels.

These recursions visit every lattice site, so they dominate runtime once
truncation depths reach 1e4-1e5 sites.  Each kernel is written as a plain
Python/NumPy function and compiled with numba at import time; setting the
environment variable JOSTSPEC_NUMBA=0 selects the uncompiled fallback path
(same code objects, no JIT).  benchmarks/bench_kernels.py compares the two.
"""

import os

import numpy as np

_env = os.environ.get("JOSTSPEC_NUMBA", "1").strip().lower()
_want_numba = _env not in ("0", "false", "off", "no")

if _want_numba:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _njit = None
        _want_numba = False

NUMBA_ENABLED = _want_numba


def backend():
    """Name of the active kernel backend: 'numba' or 'numpy'."""
    return "numba" if NUMBA_ENABLED else "numpy"


def _maybe_jit(fn):
    if NUMBA_ENABLED:
        return _njit(cache=True, nogil=True)(fn)
    return fn


# Magnitude guard for the backward recursion: above this the working pair is
# rescaled by 2**-RESCALE_SHIFT and the shift is accumulated.
RESCALE_THRESHOLD = 1e280
RESCALE_SHIFT = 600


def _jost_backward_impl(a, b, zeta, u_top, u_second):
    """Backward three-term recursion from the top boundary pair.

    a, b are site arrays indexed 0..m (b[0] is a placeholder); the recursion
    a[n] u[n+1] + (b[n] - zeta) u[n] + a[n-1] u[n-1] = 0 runs n = m..1 and
    fills u[0..m+1] with u[m+1] = u_top, u[m] = u_second.  Returns the value
    array and the accumulated power-of-two rescale exponent (the true
    solution is u * 2**scale_log2).
    """
    m = a.shape[0] - 1
    u = np.empty(m + 2, dtype=np.complex128)
    u[m + 1] = u_top
    u[m] = u_second
    scale_log2 = 0
    factor = 2.0 ** (-RESCALE_SHIFT)
    for n in range(m, 0, -1):
        u[n - 1] = -(a[n] * u[n + 1] + (b[n] - zeta) * u[n]) / a[n - 1]
        if abs(u[n - 1]) > RESCALE_THRESHOLD:
            for k in range(n - 1, m + 2):
                u[k] *= factor
            scale_log2 += RESCALE_SHIFT
    return u, scale_log2


def _strip_downward_impl(a, b, zeta, m_start, n_from):
    """Resolvent stripping m_n = 1/(b_n - zeta - a_n^2 m_{n+1}), n = n_from..1."""
    m = m_start
    for n in range(n_from, 0, -1):
        m = 1.0 / (b[n] - zeta - a[n] * a[n] * m)
    return m


def _period_products_impl(a, b, zeta, q, n_blocks):
    """Products of q consecutive one-step transfer matrices.

    Block nb is T_{(nb+1)q} ... T_{nb*q+1} with
    T_k = [[(zeta - b[k])/a[k], -a[k-1]/a[k]], [1, 0]].
    Returns an (n_blocks, 2, 2) complex array.
    """
    out = np.empty((n_blocks, 2, 2), dtype=np.complex128)
    for nb in range(n_blocks):
        p11 = 1.0 + 0.0j
        p12 = 0.0j
        p21 = 0.0j
        p22 = 1.0 + 0.0j
        for k in range(nb * q + 1, (nb + 1) * q + 1):
            t11 = (zeta - b[k]) / a[k]
            t12 = -a[k - 1] / a[k]
            n11 = t11 * p11 + t12 * p21
            n12 = t11 * p12 + t12 * p22
            p21, p22 = p11, p12
            p11, p12 = n11, n12
        out[nb, 0, 0] = p11
        out[nb, 0, 1] = p12
        out[nb, 1, 0] = p21
        out[nb, 1, 1] = p22
    return out


jost_backward = _maybe_jit(_jost_backward_impl)
strip_downward = _maybe_jit(_strip_downward_impl)
period_products = _maybe_jit(_period_products_impl)


def jost_backward_longdouble(a, b, zeta, u_top, u_second):
    """Extended-precision variant of the backward recursion (numpy only).

    Used when the precision switch requests it; accumulates in clongdouble
    and rounds back to complex128.
    """
    m = a.shape[0] - 1
    al = a.astype(np.longdouble)
    bl = b.astype(np.longdouble)
    z = np.clongdouble(zeta)
    u = np.empty(m + 2, dtype=np.clongdouble)
    u[m + 1] = u_top
    u[m] = u_second
    scale_log2 = 0
    factor = np.longdouble(2.0) ** (-RESCALE_SHIFT)
    for n in range(m, 0, -1):
        u[n - 1] = -(al[n] * u[n + 1] + (bl[n] - z) * u[n]) / al[n - 1]
        if abs(u[n - 1]) > RESCALE_THRESHOLD:
            u[n - 1:] *= factor
            scale_log2 += RESCALE_SHIFT
    return u.astype(np.complex128), scale_log2


def warm_up():
    """Trigger JIT compilation of every kernel on a tiny problem."""
    a = np.ones(5)
    b = np.zeros(5)
    jost_backward(a, b, 0.5 + 0.1j, 1.0 + 0j, 0.5 + 0j)
    strip_downward(a, b, 0.5 + 0.1j, 0.3 + 0.9j, 4)
    period_products(a, b, 0.5 + 0.1j, 2, 2)
