"""Effective channel in the transform domain.

For one path the received grid obeys Z = H_A X H_D with

    H_A = A Gamma Delta1 Pi^l A^H      (n x n, affine axis)
    H_D = F_m^H Delta2 F_m             (m x m, block axis)

Both admit closed forms built from the geometric sum
g_L(x) = sum_{k<L} exp(j 2 pi x k / L):

    H_A[mp, mm] = E[mp, mm] g_n(nu - 2 n c1 l + mm - mp) / n
    H_D[pp, qq] = g_m(m n_s f + pp - qq) / m

with the unit-modulus phase E[mp, mm] = exp(j 2 pi (c1 l^2 - mm l / n
+ c2 (mm^2 - mp^2))) and nu = n f. |g_L| is a Dirichlet ratio
|sin(pi x)| / |sin(pi x / L)|, so each kernel is a circulant peak: the
affine peak sits at mm = <mp + 2 n c1 l - nu>_n and the block peak at
pp = <qq - m b>_m (Doppler moves energy up the block-transform axis).

Summing paths and vectorizing column-major gives

    vec(Z) = H_eff vec(X),    H_eff = sum_i gain_i (H_D_i^T kron H_A_i).

Integer-shift channels (nu and nu_dd = m b both integer, 2 n c1 l integer)
make every per-path factor a single cyclic diagonal: exactly one nonzero
per row and column of the per-path H_eff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .channel import ChannelPath, ChannelRealization, block_channel_matrix, frac_split
from .transforms import chirp_phases, daft_matrix, dft_matrix
from .waveform import AddmParams

geom_sum = backend.geom_sum_np

INTEGER_TOL = 1e-9

DEFAULT_K_A = 2  # truncation half-widths; policy defaults, not physics
DEFAULT_K_F = 2


# -------------------------------------------------------------------------
# per-path factors
# -------------------------------------------------------------------------


def _affine_factors(n: int, c1: float, c2: float, delay: int, nu: float):
    """Rank-1 phase vectors and circulant kernel of the affine factor.

    H_A[i, j] = u[i] v[j] kappa[(j - i) % n].
    """
    k = np.arange(n, dtype=np.float64)
    u = chirp_phases(c2, n)
    v = np.exp(2j * np.pi * (c1 * delay * delay - k * delay / n + c2 * k * k))
    kappa = geom_sum(nu - 2.0 * n * c1 * delay + np.arange(n), n) / n
    return u, v, kappa


def affine_kernel(n: int, c1: float, c2: float, delay: int, nu: float) -> np.ndarray:
    """Closed-form affine factor for a path with normalized Doppler nu = n f."""
    u, v, kappa = _affine_factors(n, c1, c2, delay, nu)
    return backend.rank1_circulant(u, v, kappa)


def doppler_kernel(m: int, m_nu_prime: float) -> np.ndarray:
    """Closed-form block factor given m nu' = m n_s f."""
    qvec = geom_sum(m_nu_prime + np.arange(m), m) / m
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return qvec[idx]


def h_a_analytic(path: ChannelPath, p: AddmParams) -> np.ndarray:
    """Affine factor of one path from the closed form."""
    return affine_kernel(p.n, p.c1, p.c2, path.delay, p.n * path.doppler)


def h_d_analytic(path: ChannelPath, p: AddmParams) -> np.ndarray:
    """Block factor of one path from the closed form."""
    return doppler_kernel(p.m, p.m * p.n_s * path.doppler)


def h_a_brute(path: ChannelPath, p: AddmParams) -> np.ndarray:
    """Affine factor by direct matrix construction, A Gamma Delta1 Pi^l A^H."""
    a = daft_matrix(p.n, p.c1, p.c2)
    return a @ block_channel_matrix(path, p) @ a.conj().T


def h_d_brute(path: ChannelPath, p: AddmParams) -> np.ndarray:
    """Block factor by direct matrix construction, F_m^H Delta2 F_m."""
    fm = dft_matrix(p.m)
    d2 = np.exp(2j * np.pi * path.doppler * p.n_s * np.arange(p.m))
    return (fm.conj().T * d2[None, :]) @ fm


def peak_shifts(path: ChannelPath, p: AddmParams) -> tuple[int, int]:
    """Integer peak offsets (affine, block) of one path's kernels.

    The affine factor peaks at column <row + da>_n with
    da = round(2 n c1 l - nu); the block factor peaks at row
    <column + db>_m with db = -round(m b).
    """
    nu = p.n * path.doppler
    da = int(np.round(2.0 * p.n * p.c1 * path.delay - nu))
    _, b = frac_split(p.n_s * path.doppler)
    db = -int(np.round(p.m * b))
    return da, db


def _cyclic_offset(i, j, size):
    """Signed cyclic distance j - i, folded into (-size/2, size/2]."""
    d = (np.asarray(j) - np.asarray(i)) % size
    return np.where(d > size // 2, d - size, d)


# -------------------------------------------------------------------------
# assembled effective channel
# -------------------------------------------------------------------------


@dataclass
class EffectiveChannel:
    """Coordinate-form effective channel with its construction metadata.

    Entries are ordered by column then row. ``k_a``/``k_f`` are -1 for the
    untruncated modes. ``exact`` marks the integer-shift construction.
    """

    size: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    mode: str
    k_a: int = -1
    k_f: int = -1

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def nnz(self) -> int:
        return self.values.size

    def dense(self) -> np.ndarray:
        out = np.zeros((self.size, self.size), np.complex128)
        np.add.at(out, (self.rows, self.cols), self.values)
        return out


def _coo_from_dense(dense: np.ndarray, mode: str, k_a: int, k_f: int) -> EffectiveChannel:
    rows, cols = np.nonzero(dense.T)  # transpose iteration gives col-major order
    rows, cols = cols.astype(np.int64), rows.astype(np.int64)
    return EffectiveChannel(dense.shape[0], rows, cols, dense[rows, cols], mode, k_a, k_f)


def _require_integer(value: float, what: str) -> int:
    r = np.round(value)
    if abs(value - r) > INTEGER_TOL:
        raise ValueError(f"exact mode requires integer {what}, got {value}")
    return int(r)


def h_eff(
    ch: ChannelRealization,
    p: AddmParams,
    mode: str = "full",
    k_a: int = DEFAULT_K_A,
    k_f: int = DEFAULT_K_F,
) -> EffectiveChannel:
    """Assemble sum_i gain_i (H_D_i^T kron H_A_i) in coordinate form.

    mode "full" keeps every entry of the closed forms, "trunc" zeroes kernel
    entries farther than k_a (affine axis) or k_f (block axis) from each
    path's peak, and "exact" places the integer-shift entries directly,
    rejecting channels whose shifts are not integers.
    """
    if mode not in ("full", "exact", "trunc"):
        raise ValueError(f"unknown mode {mode!r}")
    mn = p.n * p.m
    dense = np.zeros((mn, mn), np.complex128)
    for path in ch.paths:
        if mode == "exact":
            ha, hd = _exact_factors(path, p)
        else:
            ha = h_a_analytic(path, p)
            hd = h_d_analytic(path, p)
            if mode == "trunc":
                ha, hd = _truncated(ha, hd, path, p, k_a, k_f)
        backend.kron_accumulate(dense, path.gain, np.ascontiguousarray(hd.T), ha)
    if mode == "full":
        k_a = k_f = -1
    elif mode == "exact":
        k_a = k_f = -1
    return _coo_from_dense(dense, mode, k_a, k_f)


def h_eff_dense(ch: ChannelRealization, p: AddmParams) -> np.ndarray:
    """Dense untruncated effective channel, the detector-facing fast path."""
    mn = p.n * p.m
    dense = np.zeros((mn, mn), np.complex128)
    for path in ch.paths:
        hd = h_d_analytic(path, p)
        backend.kron_accumulate(dense, path.gain, np.ascontiguousarray(hd.T), h_a_analytic(path, p))
    return dense


def _exact_factors(path: ChannelPath, p: AddmParams):
    nu = p.n * path.doppler
    _require_integer(nu, "nu (= n f)")
    _, b = frac_split(p.n_s * path.doppler)
    _require_integer(p.m * b, "nu_dd (= m b)")
    _require_integer(2.0 * p.n * p.c1 * path.delay, "2 n c1 l")
    da, db = peak_shifts(path, p)
    u, v, _ = _affine_factors(p.n, p.c1, p.c2, path.delay, nu)
    ha = np.zeros((p.n, p.n), np.complex128)
    rows = np.arange(p.n)
    cols = (rows + da) % p.n
    ha[rows, cols] = u[rows] * v[cols]
    hd = np.zeros((p.m, p.m), np.complex128)
    qq = np.arange(p.m)
    hd[(qq + db) % p.m, qq] = 1.0
    return ha, hd


def _truncated(ha, hd, path, p, k_a, k_f):
    da, db = peak_shifts(path, p)
    rows = np.arange(p.n)[:, None]
    cols = np.arange(p.n)[None, :]
    ha = np.where(np.abs(_cyclic_offset(rows + da, cols, p.n)) <= k_a, ha, 0.0)
    pp = np.arange(p.m)[:, None]
    qq = np.arange(p.m)[None, :]
    hd = np.where(np.abs(_cyclic_offset(qq + db, pp, p.m)) <= k_f, hd, 0.0)
    return ha, hd


# -------------------------------------------------------------------------
# scalar input-output relation
# -------------------------------------------------------------------------


def io_relation(
    x: np.ndarray,
    ch: ChannelRealization,
    p: AddmParams,
    k_a: int | None = None,
    k_f: int | None = None,
) -> np.ndarray:
    """Received grid by direct scalar summation.

    Z[mp, q] = (1/(n m)) sum_i gain_i sum_{mm, pp} E_i[mp, mm]
               g_n(nu_i - 2 n c1 l_i + mm - mp) g_m(m n_s f_i + pp - q)
               X[mm, pp]

    with mm and pp running over windows of half-width k_a and k_f around the
    per-path peaks; None means the full axis. An integer-shift channel with
    k_a = k_f = 0 reduces to the one-term-per-path peak relation.
    """
    x = np.asarray(x, np.complex128)
    if x.shape != (p.n, p.m):
        raise ValueError(f"grid shape {x.shape} does not match ({p.n}, {p.m})")
    k_a = p.n if k_a is None else int(k_a)
    k_f = p.m if k_f is None else int(k_f)
    npaths = len(ch.paths)
    e1 = np.empty((npaths, p.n), np.complex128)
    e2 = np.empty((npaths, p.n), np.complex128)
    ax0 = np.empty(npaths)
    dx0 = np.empty(npaths)
    dm = np.empty(npaths, np.int64)
    dp = np.empty(npaths, np.int64)
    k = np.arange(p.n, dtype=np.float64)
    for i, path in enumerate(ch.paths):
        e1[i] = chirp_phases(p.c2, p.n)
        e2[i] = np.exp(
            2j * np.pi * (p.c1 * path.delay**2 - k * path.delay / p.n + p.c2 * k * k)
        )
        ax0[i] = p.n * path.doppler - 2.0 * p.n * p.c1 * path.delay
        dx0[i] = p.m * p.n_s * path.doppler
        dm[i], dp[i] = peak_shifts(path, p)
    return backend.io_window_sum(x, ch.gains(), e1, e2, ax0, dx0, dm, dp, k_a, k_f)


# -------------------------------------------------------------------------
# coordinate-file export
# -------------------------------------------------------------------------


def write_coo(path_like, eff: EffectiveChannel) -> None:
    """Write ``# size k_a k_f exact`` then one ``row col re im`` line per entry."""
    with open(path_like, "w") as fh:
        fh.write(f"# {eff.size} {eff.k_a} {eff.k_f} {1 if eff.exact else 0}\n")
        for r, c, v in zip(eff.rows, eff.cols, eff.values):
            fh.write(f"{r} {c} {float(v.real)!r} {float(v.imag)!r}\n")


def read_coo(path_like) -> EffectiveChannel:
    """Read a file written by :func:`write_coo`."""
    with open(path_like) as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[0] != "#":
            raise ValueError("missing coordinate-file header")
        size, k_a, k_f, exact = (int(v) for v in header[1:])
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, re, im = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(re) + 1j * float(im))
    if exact:
        mode = "exact"
    elif k_a >= 0 or k_f >= 0:
        mode = "trunc"
    else:
        mode = "full"
    return EffectiveChannel(
        size,
        np.array(rows, np.int64),
        np.array(cols, np.int64),
        np.array(vals, np.complex128),
        mode,
        k_a,
        k_f,
    )
