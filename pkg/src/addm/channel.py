"""Doubly selective multipath channel, sample-domain and block-matrix forms.

A path is (gain, integer delay, digital Doppler frequency f in cycles per
sample). The sample-domain form convolves the serialized frame:

    rx[g] = sum_i gain_i tx[g - l_i] exp(j 2 pi f_i (g - n_cp)) + w[g]

with zeros before the frame start. The Doppler phase is referenced to the
first data-carrying sample of block 0 (hence the n_cp offset), which makes
the block-matrix form below agree with it exactly, not just up to a
per-path constant.

The block form acts on the unprefixed n x m grid S:

    R = sum_i gain_i Gamma_i Delta1_i Pi^{l_i} S Delta2_i + W

where Pi is the forward cyclic shift, Delta1 = diag(exp(j 2 pi f g)) over
rows, Delta2 = diag(exp(j 2 pi f n_s k)) over blocks, and Gamma_i carries the
prefix phase exp(-j 2 pi c1 (n^2 - 2 n (l_i - g))) on rows g < l_i. Both
forms are exact as long as every delay is at most n_cp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .waveform import AddmParams


@dataclass(frozen=True)
class ChannelPath:
    """One propagation path."""

    gain: complex
    delay: int
    doppler: float  # cycles per sample

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("path delay must be nonnegative")


@dataclass(frozen=True)
class ChannelRealization:
    """A set of paths plus the complex noise variance per sample."""

    paths: tuple[ChannelPath, ...]
    noise_var: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if self.noise_var < 0:
            raise ValueError("noise variance must be nonnegative")

    def gains(self) -> np.ndarray:
        return np.array([p.gain for p in self.paths], np.complex128)

    def delays(self) -> np.ndarray:
        return np.array([p.delay for p in self.paths], np.int64)

    def dopplers(self) -> np.ndarray:
        return np.array([p.doppler for p in self.paths], np.float64)


def frac_split(x: float) -> tuple[int, float]:
    """Split x = i + r with integer i and r in (-1/2, 1/2]."""
    i = math.ceil(x - 0.5)
    return i, x - i


def doppler_parts(path: ChannelPath, p: AddmParams) -> tuple[int, float, int, float, float]:
    """Normalized Doppler decomposition (alpha, a, beta, b, nu_dd).

    nu = n f = alpha + a is the shift in row-transform bins, nu' = n_s f =
    beta + b the shift in block-rate cycles, and nu_dd = m b the shift in
    block-transform bins. Fractional parts live in (-1/2, 1/2].
    """
    alpha, a = frac_split(p.n * path.doppler)
    beta, b = frac_split(p.n_s * path.doppler)
    return alpha, a, beta, b, p.m * b


def jakes_paths(
    n_paths: int,
    alpha_max: float,
    p: AddmParams,
    case: str,
    rng: np.random.Generator,
) -> list[ChannelPath]:
    """Random paths with Jakes-distributed Doppler.

    nu_i = alpha_max cos(theta_i) with theta_i uniform on [-pi, pi), so
    f_i = nu_i / n in this waveform's normalization. Delay profile "I" is
    0, 1, .., n_paths - 1; profile "II" puts every path at delay 1. Gains
    are i.i.d. circular Gaussian with total mean power 1.

    Draw order (one uniform block, one normal block) is part of the
    reproducibility contract of the Monte Carlo harness.
    """
    if case not in ("I", "II"):
        raise ValueError(f"unknown delay profile {case!r}")
    theta = rng.uniform(-np.pi, np.pi, n_paths)
    gauss = rng.standard_normal(2 * n_paths)
    nu = alpha_max * np.cos(theta)
    gains = (gauss[:n_paths] + 1j * gauss[n_paths:]) * math.sqrt(0.5 / n_paths)
    delays = np.arange(n_paths) if case == "I" else np.ones(n_paths, np.int64)
    return [
        ChannelPath(complex(gains[i]), int(delays[i]), float(nu[i] / p.n))
        for i in range(n_paths)
    ]


def _noise(shape, var: float, rng: np.random.Generator) -> np.ndarray:
    size = int(np.prod(shape))
    g = rng.standard_normal(2 * size)
    w = (g[:size] + 1j * g[size:]) * math.sqrt(var / 2.0)
    return w.reshape(shape)


def apply_samples(
    tx: np.ndarray,
    ch: ChannelRealization,
    p: AddmParams,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Run a serialized frame through the sample-domain channel.

    Noise is added only when both a generator is supplied and
    ch.noise_var > 0.
    """
    tx = np.ascontiguousarray(tx, np.complex128)
    if tx.size != p.frame_len:
        raise ValueError(f"frame length {tx.size} does not match params ({p.frame_len})")
    if any(path.delay > p.n_cp for path in ch.paths):
        raise ValueError("path delay exceeds the prefix length")
    rx = backend.apply_paths(tx, ch.gains(), ch.delays(), ch.dopplers(), float(p.n_cp))
    if rng is not None and ch.noise_var > 0:
        rx = rx + _noise(rx.shape, ch.noise_var, rng)
    return rx


def gamma_cpp(p: AddmParams, delay: int) -> np.ndarray:
    """Diagonal of the prefix phase matrix for one path delay."""
    g = np.arange(p.n, dtype=np.float64)
    phase = np.exp(-2j * np.pi * p.c1 * (float(p.n) ** 2 - 2.0 * p.n * (delay - g)))
    return np.where(g < delay, phase, 1.0 + 0.0j)


def block_channel_matrix(path: ChannelPath, p: AddmParams) -> np.ndarray:
    """Per-block sample-domain matrix of one path, Gamma Delta1 Pi^l."""
    rows = np.arange(p.n)
    d1 = gamma_cpp(p, path.delay) * np.exp(2j * np.pi * path.doppler * rows)
    out = np.zeros((p.n, p.n), np.complex128)
    out[rows, (rows - path.delay) % p.n] = d1
    return out


def apply_block(
    s: np.ndarray,
    ch: ChannelRealization,
    p: AddmParams,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Run the unprefixed grid through the block-matrix channel."""
    s = np.asarray(s, np.complex128)
    if s.shape != (p.n, p.m):
        raise ValueError(f"grid shape {s.shape} does not match ({p.n}, {p.m})")
    if any(path.delay > p.n_cp for path in ch.paths):
        raise ValueError("path delay exceeds the prefix length")
    rows = np.arange(p.n, dtype=np.float64)
    blocks = np.arange(p.m, dtype=np.float64)
    out = np.zeros((p.n, p.m), np.complex128)
    for path in ch.paths:
        d1 = gamma_cpp(p, path.delay) * np.exp(2j * np.pi * path.doppler * rows)
        d2 = np.exp(2j * np.pi * path.doppler * p.n_s * blocks)
        out += path.gain * d1[:, None] * np.roll(s, path.delay, axis=0) * d2[None, :]
    if rng is not None and ch.noise_var > 0:
        out = out + _noise(out.shape, ch.noise_var, rng)
    return out


def load_paths(path_file) -> list[ChannelPath]:
    """Read a deterministic path list from a text file.

    One path per line: ``gain_re gain_im delay doppler``. Blank lines and
    lines starting with ``#`` are skipped.
    """
    paths = []
    with open(path_file) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{path_file}:{lineno}: expected 4 fields, got {len(parts)}")
            re, im, delay, doppler = parts
            paths.append(ChannelPath(float(re) + 1j * float(im), int(delay), float(doppler)))
    if not paths:
        raise ValueError(f"{path_file}: no paths found")
    return paths
