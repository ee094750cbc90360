"""Symbol mapping and linear MMSE detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve


@dataclass(frozen=True)
class Constellation:
    """Unit-energy symbol alphabet with positional bit labeling.

    ``points[i]`` carries the bits of i, most significant first, so mapping
    is a table lookup and hard demapping is a nearest-point search.
    """

    points: np.ndarray
    bits_per_symbol: int

    def __post_init__(self):
        if self.points.size != 1 << self.bits_per_symbol:
            raise ValueError("constellation size does not match bits_per_symbol")
        self.points.setflags(write=False)


def qpsk() -> Constellation:
    """Gray-labeled QPSK, ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)."""
    b = np.arange(4)
    points = ((1 - 2 * (b >> 1)) + 1j * (1 - 2 * (b & 1))) / np.sqrt(2.0)
    return Constellation(points, 2)


def map_bits(bits: np.ndarray, const: Constellation) -> np.ndarray:
    """Map a flat bit array (multiple of bits_per_symbol) to symbols."""
    bits = np.asarray(bits)
    bps = const.bits_per_symbol
    if bits.size % bps:
        raise ValueError(f"bit count {bits.size} is not a multiple of {bps}")
    groups = bits.reshape(-1, bps)
    idx = groups @ (1 << np.arange(bps - 1, -1, -1))
    return const.points[idx]


def demap_hard(symbols: np.ndarray, const: Constellation) -> np.ndarray:
    """Nearest-point hard decisions, returned as a flat bit array."""
    symbols = np.asarray(symbols).ravel()
    idx = np.argmin(np.abs(symbols[:, None] - const.points[None, :]), axis=1)
    bps = const.bits_per_symbol
    shifts = np.arange(bps - 1, -1, -1)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()


def mmse_equalize(z: np.ndarray, h: np.ndarray, sigma2: float) -> np.ndarray:
    """Linear MMSE estimate H^H (H H^H + sigma2 I)^{-1} z.

    Solved through a Cholesky factorization of the Gram matrix; singular
    Gram matrices (only possible at sigma2 = 0 with a rank-deficient
    channel) surface as scipy.linalg.LinAlgError.
    """
    if hasattr(h, "dense"):
        h = h.dense()
    h = np.asarray(h, np.complex128)
    z = np.asarray(z, np.complex128).ravel()
    gram = h @ h.conj().T
    gram.flat[:: gram.shape[0] + 1] += sigma2
    return h.conj().T @ cho_solve(cho_factor(gram, lower=True), z)
