"""Kernel backends: numba-compiled loops with pure-numpy twins.

Every hot per-entry kernel exists twice, as a compiled loop nest and as a
vectorized numpy implementation with identical semantics. The compiled path
is the default whenever numba imports; set ``ADDM_DISABLE_NUMBA=1`` in the
environment (before import) to force the numpy path. ``benchmarks/`` compares
the two.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        return wrap


NUMBA_OPTS = {"cache": True}

USE_NUMBA = HAVE_NUMBA and os.environ.get("ADDM_DISABLE_NUMBA", "").lower() not in (
    "1",
    "true",
    "yes",
)


# =========================================================================
# geometric sum of N-th roots, sum_{k<size} exp(j 2 pi x k / size)
# =========================================================================

SING_TOL = 1e-12  # distance from an exact multiple of size treated as the limit


def geom_sum_np(x, size):
    """Closed form of sum_{k<size} exp(j 2 pi x k / size) for real x.

    Removable singularities at x = 0 (mod size) return the limit value
    ``size``. Vectorized over x.
    """
    x = np.mod(np.asarray(x, dtype=np.float64), size)
    d = np.where(x > size / 2, x - size, x)
    sing = np.abs(d) < SING_TOL
    xs = np.where(sing, 1.0, x)
    out = np.exp(1j * np.pi * xs * (size - 1) / size) * (
        np.sin(np.pi * xs) / np.sin(np.pi * xs / size)
    )
    return np.where(sing, complex(size), out)


def _geom_scalar_py(x, size):
    xm = x % size
    d = xm - size if xm > size / 2 else xm
    if abs(d) < SING_TOL:
        return complex(size)
    return np.exp(1j * np.pi * xm * (size - 1) / size) * (
        np.sin(np.pi * xm) / np.sin(np.pi * xm / size)
    )


geom_scalar = njit(**NUMBA_OPTS)(_geom_scalar_py) if HAVE_NUMBA else _geom_scalar_py


# =========================================================================
# rank-1 times circulant assembly: out[i, j] = u[i] * v[j] * w[(j - i) % n]
# =========================================================================


def rank1_circulant_np(u, v, w):
    n = u.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return u[:, None] * v[None, :] * w[idx]


def _rank1_circulant_loops(u, v, w):
    n = u.size
    out = np.empty((n, n), np.complex128)
    for i in range(n):
        for j in range(n):
            out[i, j] = u[i] * v[j] * w[(j - i) % n]
    return out


rank1_circulant_jit = njit(**NUMBA_OPTS)(_rank1_circulant_loops)
rank1_circulant = rank1_circulant_jit if USE_NUMBA else rank1_circulant_np


# =========================================================================
# Kronecker accumulation: out += w * kron(b, c), in place
# =========================================================================


def kron_accumulate_np(out, w, b, c):
    out += w * np.kron(b, c)
    return out


def _kron_accumulate_loops(out, w, b, c):
    rb, cb = b.shape
    rc, cc = c.shape
    for i in range(rb):
        for j in range(cb):
            wb = w * b[i, j]
            if wb == 0:
                continue
            ro = i * rc
            co = j * cc
            for k in range(rc):
                for l in range(cc):
                    out[ro + k, co + l] += wb * c[k, l]
    return out


kron_accumulate_jit = njit(**NUMBA_OPTS)(_kron_accumulate_loops)
kron_accumulate = kron_accumulate_jit if USE_NUMBA else kron_accumulate_np


# =========================================================================
# sample-domain multipath: rx[g] = sum_i gain_i tx[g - l_i] e^{j2pi f_i (g - ref)}
# =========================================================================


def apply_paths_np(tx, gains, delays, dopplers, phase_ref):
    size = tx.size
    g = np.arange(size, dtype=np.float64)
    rx = np.zeros(size, np.complex128)
    for i in range(gains.size):
        l = int(delays[i])
        shifted = np.concatenate([np.zeros(l, np.complex128), tx[: size - l]])
        rx += gains[i] * shifted * np.exp(2j * np.pi * dopplers[i] * (g - phase_ref))
    return rx


def _apply_paths_loops(tx, gains, delays, dopplers, phase_ref):
    size = tx.size
    rx = np.zeros(size, np.complex128)
    for i in range(gains.size):
        gain = gains[i]
        l = delays[i]
        f = dopplers[i]
        for g in range(l, size):
            rx[g] += gain * tx[g - l] * np.exp(2j * np.pi * f * (g - phase_ref))
    return rx


apply_paths_jit = njit(**NUMBA_OPTS)(_apply_paths_loops)
apply_paths = apply_paths_jit if USE_NUMBA else apply_paths_np


# =========================================================================
# windowed scalar input-output sum
#
# out[mp, q] = (1/(n*m)) * sum_i h_i * sum_{da, df}
#                e1[i, mp] * e2[i, mm] * geom(ax0[i] + mm - mp, n)
#              * geom(dx0[i] + pp - q, m) * x[mm, pp]
# with mm = (mp + dm[i] + da) % n over the affine window and
#      pp = (q + dp[i] + df) % m over the Doppler window.
# Window offsets enumerate min(2k+1, axis size) consecutive values centred
# on the per-path peak, so a wide window visits each index exactly once.
# =========================================================================


def _window_offsets(k, size):
    count = min(2 * k + 1, size)
    start = -(count // 2)
    return np.arange(start, start + count)


def io_window_sum_np(x, gains, e1, e2, ax0, dx0, dm, dp, k_a, k_f):
    n, m = x.shape
    out = np.zeros((n, m), np.complex128)
    mp = np.arange(n)[:, None]
    q = np.arange(m)[None, :]
    for i in range(gains.size):
        for da in _window_offsets(k_a, n):
            mm = (mp + dm[i] + da) % n
            ka = geom_sum_np(ax0[i] + mm - mp, n)
            for df in _window_offsets(k_f, m):
                pp = (q + dp[i] + df) % m
                kf = geom_sum_np(dx0[i] + pp - q, m)
                out += gains[i] * e1[i, mp] * e2[i, mm] * ka * kf * x[mm, pp]
    return out / (n * m)


def _io_window_sum_loops(x, gains, e1, e2, ax0, dx0, dm, dp, k_a, k_f):
    n, m = x.shape
    out = np.zeros((n, m), np.complex128)
    ca = min(2 * k_a + 1, n)
    cf = min(2 * k_f + 1, m)
    for mp in range(n):
        for q in range(m):
            acc = 0.0 + 0.0j
            for i in range(gains.size):
                for ia in range(ca):
                    da = ia - ca // 2
                    mm = (mp + dm[i] + da) % n
                    ka = geom_scalar(ax0[i] + mm - mp, n)
                    term_a = gains[i] * e1[i, mp] * e2[i, mm] * ka
                    for jf in range(cf):
                        df = jf - cf // 2
                        pp = (q + dp[i] + df) % m
                        kf = geom_scalar(dx0[i] + pp - q, m)
                        acc += term_a * kf * x[mm, pp]
            out[mp, q] = acc
    return out / (n * m)


io_window_sum_jit = njit(**NUMBA_OPTS)(_io_window_sum_loops)
io_window_sum = io_window_sum_jit if USE_NUMBA else io_window_sum_np
