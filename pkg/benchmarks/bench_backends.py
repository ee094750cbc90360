"""Time the numpy kernels against their compiled twins.

Run from the repo root:

    python3 benchmarks/bench_backends.py [--repeat 20]

The compiled twins are imported directly, so this works (and is meaningful)
regardless of ADDM_DISABLE_NUMBA.
"""

import argparse
import time

import numpy as np

from addm import backend


def best_of(fn, args, repeat):
    fn(*args)  # warm (JIT compile / cache load)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def cases(rng):
    n, m = 128, 16
    npaths = 6

    u, v, w = cvec(rng, n), cvec(rng, n), cvec(rng, n)
    yield "rank1_circulant (n=128)", backend.rank1_circulant_np, backend.rank1_circulant_jit, (u, v, w)

    b = cvec(rng, m * m).reshape(m, m)
    c = cvec(rng, n * n).reshape(n, n)
    out = np.zeros((n * m, n * m), np.complex128)
    yield "kron_accumulate (2048^2)", backend.kron_accumulate_np, backend.kron_accumulate_jit, (out, 0.7 + 0.1j, b, c)

    tx = cvec(rng, (n + 4) * m)
    gains = cvec(rng, npaths)
    delays = rng.integers(0, 4, npaths).astype(np.int64)
    dopplers = rng.uniform(-0.02, 0.02, npaths)
    yield "apply_paths (2112 samples)", backend.apply_paths_np, backend.apply_paths_jit, (tx, gains, delays, dopplers, 4.0)

    x = cvec(rng, n * m).reshape(n, m)
    e1 = cvec(rng, npaths * n).reshape(npaths, n)
    e2 = cvec(rng, npaths * n).reshape(npaths, n)
    ax0 = rng.uniform(-3, 3, npaths)
    dx0 = rng.uniform(-2, 2, npaths)
    dm = rng.integers(-3, 4, npaths)
    dp = rng.integers(-2, 3, npaths)
    yield "io_window_sum (k=2, 128x16)", backend.io_window_sum_np, backend.io_window_sum_jit, (x, gains, e1, e2, ax0, dx0, dm, dp, 2, 2)

    yield "io_window_sum (full width)", backend.io_window_sum_np, backend.io_window_sum_jit, (x, gains, e1, e2, ax0, dx0, dm, dp, n // 2, m // 2)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':<30} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, fn_np, fn_jit, call_args in cases(rng):
        t_np = best_of(fn_np, call_args, args.repeat)
        t_jit = best_of(fn_jit, call_args, args.repeat)
        print(f"{name:<30} {t_np * 1e3:>8.3f}ms {t_jit * 1e3:>8.3f}ms {t_np / t_jit:>7.1f}x")


if __name__ == "__main__":
    main()
