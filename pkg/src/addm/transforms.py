"""Unitary chirp-Fourier transforms.

Conventions used throughout the package: the size-n DFT matrix has entries
exp(-j 2 pi m k / n) / sqrt(n), and the discrete affine Fourier transform
(DAFT) composes two quadratic chirp diagonals around it,

    A = Lambda_c2 @ F @ Lambda_c1,    Lambda_c = diag(exp(-j 2 pi c k^2)).

Both chirp rates zero recovers the plain DFT. All matrices are unitary, so
the inverse transform is the conjugate transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CACHE: dict = {}


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix of size n.

    Parameters
    ----------
    n : int
        Transform size, n >= 1.

    Returns
    -------
    ndarray
        n x n complex matrix with entries exp(-j 2 pi m k / n) / sqrt(n).
        The returned array is a cached read-only view; copy before mutating.
    """
    key = ("dft", n)
    if key not in _CACHE:
        k = np.arange(n)
        mat = np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
        mat.setflags(write=False)
        _CACHE[key] = mat
    return _CACHE[key]


def chirp_phases(c: float, n: int) -> np.ndarray:
    """Diagonal entries exp(-j 2 pi c k^2) of the quadratic chirp, k = 0..n-1."""
    k = np.arange(n, dtype=np.float64)
    return np.exp(-2j * np.pi * c * k * k)


def chirp_diag(c: float, n: int) -> np.ndarray:
    """Quadratic chirp diagonal matrix diag(exp(-j 2 pi c k^2))."""
    return np.diag(chirp_phases(c, n))


def daft_matrix(n: int, c1: float, c2: float) -> np.ndarray:
    """DAFT matrix Lambda_c2 @ F_n @ Lambda_c1 of size n.

    Entry [m, k] equals exp(-j 2 pi (c2 m^2 + m k / n + c1 k^2)) / sqrt(n).
    Cached and read-only like :func:`dft_matrix`; daft_matrix(n, 0, 0) is the
    plain DFT matrix.
    """
    key = ("daft", n, float(c1), float(c2))
    if key not in _CACHE:
        mat = chirp_phases(c2, n)[:, None] * dft_matrix(n) * chirp_phases(c1, n)[None, :]
        mat.setflags(write=False)
        _CACHE[key] = mat
    return _CACHE[key]


def daft_entry(n: int, c1: float, c2: float, m: int, k: int) -> complex:
    """Single DAFT entry evaluated from the closed formula.

    Indices are deliberately not reduced modulo n, so this doubles as the
    reference for the periodic-extension laws below.
    """
    return np.exp(-2j * np.pi * (c2 * float(m) ** 2 + m * k / n + c1 * float(k) ** 2)) / np.sqrt(n)


def output_extension_phase(n: int, c2: float, m: int, k: int) -> complex:
    """Phase relating output index m + k n to output index m.

    A forward transform evaluated at the extended output index m + k n equals
    this factor times the value at m: exp(-j 2 pi c2 (k^2 n^2 + 2 k n m)).
    """
    return np.exp(-2j * np.pi * c2 * (float(k) ** 2 * n**2 + 2.0 * k * n * m))


def input_extension_phase(n: int, c1: float, idx: int, k: int) -> complex:
    """Phase relating input index idx + k n to input index idx.

    An inverse transform evaluated at the extended input index idx + k n
    equals this factor times the value at idx:
    exp(+j 2 pi c1 (k^2 n^2 + 2 k n idx)).
    """
    return np.exp(2j * np.pi * c1 * (float(k) ** 2 * n**2 + 2.0 * k * n * idx))


@dataclass(frozen=True)
class UnitaryTransform:
    """A unitary analysis matrix with its chirp rates."""

    matrix: np.ndarray
    c1: float
    c2: float

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def daft_transform(n: int, c1: float, c2: float) -> UnitaryTransform:
    """DAFT wrapped as a :class:`UnitaryTransform`."""
    return UnitaryTransform(daft_matrix(n, c1, c2), float(c1), float(c2))


def dft_transform(n: int) -> UnitaryTransform:
    """Plain DFT wrapped as a :class:`UnitaryTransform`."""
    return UnitaryTransform(dft_matrix(n), 0.0, 0.0)


def apply_forward(t: UnitaryTransform, x: np.ndarray) -> np.ndarray:
    """Forward transform: t.matrix @ x (x may be a vector or a matrix)."""
    return t.matrix @ x


def apply_inverse(t: UnitaryTransform, x: np.ndarray) -> np.ndarray:
    """Inverse transform via the conjugate transpose."""
    return t.matrix.conj().T @ x
