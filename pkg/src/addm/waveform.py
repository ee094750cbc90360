"""Block transceiver for chirp-spread multicarrier grids.

A frame is an n x m grid X of data symbols in the affine-Doppler (AD) domain.
Modulation applies the inverse DAFT down the rows and the inverse DFT across
the columns, S = A^H X F_m^H, prepends a chirp-periodic prefix to every
column, and serializes column-major. Block k therefore occupies samples
k (n + n_cp) .. k (n + n_cp) + n + n_cp - 1 of the transmit vector.

The prefix copies the tail rows with the quadratic phase that makes the
transmitted block look periodic to the chirp basis: row g = -n_cp .. -1
carries S[n + g, k] exp(-j 2 pi c1 (n^2 + 2 n g)). With c1 = 0 this is the
ordinary cyclic prefix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transforms import daft_matrix, dft_matrix

DOMAINS = ("AD", "TA", "TD")


@dataclass(frozen=True)
class AddmParams:
    """Static waveform parameters.

    Attributes
    ----------
    n : int
        Rows per block (chirp transform size).
    m : int
        Blocks per frame.
    n_cp : int
        Prefix length in samples, 0 <= n_cp <= n.
    c1 : float
        Input chirp rate of the row transform.
    c2 : float
        Output chirp rate of the row transform.
    """

    n: int
    m: int
    n_cp: int
    c1: float
    c2: float = 0.0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("grid dimensions must be positive")
        if not 0 <= self.n_cp <= self.n:
            raise ValueError("prefix length must satisfy 0 <= n_cp <= n")

    @property
    def n_s(self) -> int:
        """Samples per block including the prefix."""
        return self.n + self.n_cp

    @property
    def frame_len(self) -> int:
        """Samples per serialized frame."""
        return self.n_s * self.m


@dataclass(frozen=True)
class SymbolGrid:
    """An n x m grid tagged with the domain it lives in ("AD", "TA", "TD")."""

    data: np.ndarray
    domain: str

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")


@dataclass(frozen=True)
class ModulationTrace:
    """Per-stage intermediates of one modulated frame."""

    ad: np.ndarray
    ta: np.ndarray
    td: np.ndarray
    with_prefix: np.ndarray
    serial: np.ndarray


def _grid_data(x, p: AddmParams, domain: str) -> np.ndarray:
    if isinstance(x, SymbolGrid):
        if x.domain != domain:
            raise ValueError(f"expected a {domain} grid, got {x.domain}")
        x = x.data
    x = np.asarray(x)
    if x.shape != (p.n, p.m):
        raise ValueError(f"grid shape {x.shape} does not match ({p.n}, {p.m})")
    return x


def modulate(x, p: AddmParams) -> np.ndarray:
    """Map an AD-domain grid to the time-delay domain, S = A^H X F_m^H.

    Evaluated as A^H (X F_m^H), the same association the transmit-family
    factory uses, so the native chain and its preset agree bit for bit.
    """
    x = _grid_data(x, p, "AD")
    a = daft_matrix(p.n, p.c1, p.c2)
    fm = dft_matrix(p.m)
    return a.conj().T @ (x @ fm.conj().T)


def demodulate(r, p: AddmParams) -> np.ndarray:
    """Map a received time-delay grid back to the AD domain, Z = A R F_m."""
    r = _grid_data(r, p, "TD")
    a = daft_matrix(p.n, p.c1, p.c2)
    fm = dft_matrix(p.m)
    return a @ r @ fm


def prefix_phases(n: int, n_cp: int, c1: float) -> np.ndarray:
    """Phases exp(-j 2 pi c1 (n^2 + 2 n g)) for prefix rows g = -n_cp .. -1."""
    g = np.arange(-n_cp, 0, dtype=np.float64)
    return np.exp(-2j * np.pi * c1 * (float(n) ** 2 + 2.0 * n * g))


def add_cpp(s: np.ndarray, p: AddmParams) -> np.ndarray:
    """Prepend the chirp-periodic prefix to every block (column)."""
    s = np.asarray(s)
    if s.shape[0] != p.n:
        raise ValueError("block length does not match params")
    if p.n_cp == 0:
        return s.copy()
    pre = s[p.n - p.n_cp :, :] * prefix_phases(p.n, p.n_cp, p.c1)[:, None]
    return np.vstack([pre, s])


def discard_cpp(r: np.ndarray, p: AddmParams) -> np.ndarray:
    """Drop the prefix rows of every block."""
    r = np.asarray(r)
    if r.shape[0] != p.n_s:
        raise ValueError("extended block length does not match params")
    return r[p.n_cp :, :]


def cpp_matrix(p: AddmParams) -> np.ndarray:
    """Prefix insertion as an (n + n_cp) x n matrix, for cross-checks."""
    top = np.zeros((p.n_cp, p.n), np.complex128)
    if p.n_cp:
        top[:, p.n - p.n_cp :] = np.diag(prefix_phases(p.n, p.n_cp, p.c1))
    return np.vstack([top, np.eye(p.n)])


def vec_frame(s: np.ndarray) -> np.ndarray:
    """Serialize a grid column-major (block after block)."""
    return np.asarray(s).flatten(order="F")


def unvec_frame(x: np.ndarray, rows: int) -> np.ndarray:
    """Inverse of :func:`vec_frame` for a known block length."""
    x = np.asarray(x)
    if x.size % rows:
        raise ValueError("vector length is not a multiple of the block length")
    return x.reshape((rows, -1), order="F")


def transmit(x, p: AddmParams) -> np.ndarray:
    """Full transmit chain: modulate, prefix, serialize."""
    return vec_frame(add_cpp(modulate(x, p), p))


def transmit_traced(x, p: AddmParams) -> tuple[np.ndarray, ModulationTrace]:
    """Like :func:`transmit` but returning every intermediate stage."""
    ad = _grid_data(x, p, "AD")
    ta = ad @ dft_matrix(p.m).conj().T
    td = daft_matrix(p.n, p.c1, p.c2).conj().T @ ta
    ext = add_cpp(td, p)
    serial = vec_frame(ext)
    return serial, ModulationTrace(ad, ta, td, ext, serial)


def receive_frame(rx: np.ndarray, p: AddmParams) -> np.ndarray:
    """Deserialize, drop prefixes, demodulate. Inverse of :func:`transmit`
    over an ideal channel."""
    return demodulate(discard_cpp(unvec_frame(rx, p.n_s), p), p)


# =========================================================================
# transmit-family factory
#
# The general serialized frame is
#     x = T_rcp vec(T_cp T_F T_V X T_B)
# where T_V zero-pads valid_len rows up to n, T_F is the row transform
# (A^H or identity), T_B the column transform (F_m^H or identity), T_cp the
# per-block prefix and T_rcp an optional whole-frame reduced prefix that
# prepends the frame's last rcp_len samples. Each named preset is one row of
# that factorization.
# =========================================================================


@dataclass(frozen=True)
class FamilyConfig:
    """One member of the transmit family."""

    name: str
    rcp_len: int
    cp_len: int
    cp_c1: float
    forward: str  # "daft" or "identity"
    fwd_c1: float
    fwd_c2: float
    valid_len: int
    backward: str  # "idft" or "identity"


_SINGLE_COLUMN = ("CP-AFDM", "CP-OFDM", "CP-OCDM", "LFM")

PRESET_NAMES = (
    "CP-ADDM",
    "CP-AFDM",
    "CP-OFDM",
    "CP-OCDM",
    "CP-FDDM",
    "CP-OTFS",
    "RCP-OTFS",
    "LFM",
)


def preset(name: str, p: AddmParams, rcp_len: int | None = None) -> FamilyConfig:
    """Named transmit-family member bound to concrete parameters.

    Single-column members (CP-AFDM, CP-OFDM, CP-OCDM, LFM) require m = 1.
    RCP-OTFS takes the reduced-prefix length from ``rcp_len`` and defaults
    to n_cp; every other member ignores the argument.
    """
    key = name.upper()
    if key in _SINGLE_COLUMN and p.m != 1:
        raise ValueError(f"{key} needs single-column params (m = 1), got m = {p.m}")
    if key == "CP-ADDM":
        return FamilyConfig(key, 0, p.n_cp, p.c1, "daft", p.c1, p.c2, p.n, "idft")
    if key == "CP-AFDM":
        return FamilyConfig(key, 0, p.n_cp, p.c1, "daft", p.c1, p.c2, p.n, "idft")
    if key == "CP-OFDM":
        return FamilyConfig(key, 0, p.n_cp, 0.0, "daft", 0.0, 0.0, p.n, "idft")
    if key == "CP-OCDM":
        c = 1.0 / (2.0 * p.n)
        return FamilyConfig(key, 0, p.n_cp, c, "daft", c, c, p.n, "idft")
    if key == "CP-FDDM":
        # the prefix keeps the params' chirp rate even though the row
        # transform is the plain IDFT
        return FamilyConfig(key, 0, p.n_cp, p.c1, "daft", 0.0, 0.0, p.n, "idft")
    if key == "CP-OTFS":
        return FamilyConfig(key, 0, p.n_cp, 0.0, "identity", 0.0, 0.0, p.n, "idft")
    if key == "RCP-OTFS":
        n_rcp = p.n_cp if rcp_len is None else int(rcp_len)
        return FamilyConfig(key, n_rcp, 0, 0.0, "identity", 0.0, 0.0, p.n, "idft")
    if key == "LFM":
        return FamilyConfig(key, 0, 0, 0.0, "daft", p.c1, 0.0, 1, "idft")
    raise ValueError(f"unknown preset {name!r}")


def rcp_matrix(frame_len: int, n_rcp: int) -> np.ndarray:
    """Reduced-prefix insertion matrix: prepends the frame's last n_rcp samples."""
    eye = np.eye(frame_len)
    return np.vstack([eye[frame_len - n_rcp :], eye])


def general_transmit(x, p: AddmParams, fam: FamilyConfig) -> np.ndarray:
    """Serialized frame for any family member.

    ``x`` must be (fam.valid_len, p.m). Rows beyond valid_len are zero
    padded before the row transform.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (fam.valid_len, p.m):
        raise ValueError(f"grid shape {x.shape} does not match ({fam.valid_len}, {p.m})")
    if fam.backward == "idft":
        x = x @ dft_matrix(p.m).conj().T
    if fam.valid_len < p.n:
        x = np.vstack([x, np.zeros((p.n - fam.valid_len, p.m), np.complex128)])
    if fam.forward == "daft":
        x = daft_matrix(p.n, fam.fwd_c1, fam.fwd_c2).conj().T @ x
    if fam.cp_len:
        pre = x[p.n - fam.cp_len :, :] * prefix_phases(p.n, fam.cp_len, fam.cp_c1)[:, None]
        x = np.vstack([pre, x])
    serial = vec_frame(x)
    if fam.rcp_len:
        serial = np.concatenate([serial[serial.size - fam.rcp_len :], serial])
    return serial
