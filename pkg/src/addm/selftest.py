"""Built-in property checks behind ``addm selftest``.

Each check exercises one library invariant end to end and prints a PASS or
FAIL line; the run count of failures becomes the process exit code. The
checks are a fast subset of the test suite meant for installed copies.
"""

from __future__ import annotations

import numpy as np

from . import effective
from .channel import ChannelPath, ChannelRealization, apply_block, apply_samples, jakes_paths
from .detection import demap_hard, map_bits, mmse_equalize, qpsk
from .harness import SimConfig, run_ber, to_csv
from .transforms import daft_matrix, dft_matrix
from .waveform import AddmParams, demodulate, modulate, preset, general_transmit, receive_frame, transmit


def _rng():
    return np.random.default_rng(2024)


def check_unitarity():
    a = daft_matrix(64, 31 / 256, 1 / 8192)
    err = np.max(np.abs(a @ a.conj().T - np.eye(64)))
    assert err < 1e-12, f"unitarity defect {err:.3e}"


def check_dft_reduction():
    err = np.max(np.abs(daft_matrix(32, 0.0, 0.0) - dft_matrix(32)))
    assert err < 1e-14, f"DAFT(0,0) vs DFT {err:.3e}"


def check_loopback():
    p = AddmParams(16, 4, 3, 5 / 32, 1 / 409.6)
    x = _rng().standard_normal((16, 4)) + 1j * _rng().standard_normal((16, 4))
    err = np.max(np.abs(receive_frame(transmit(x, p), p) - x))
    assert err < 1e-12, f"loopback error {err:.3e}"


def check_channel_duality():
    p = AddmParams(16, 4, 3, 5 / 32)
    rng = _rng()
    ch = ChannelRealization(tuple(jakes_paths(3, 2.0, p, "I", rng)), 0.0)
    x = rng.standard_normal((16, 4)) + 1j * rng.standard_normal((16, 4))
    s = modulate(x, p)
    from .waveform import add_cpp, discard_cpp, unvec_frame, vec_frame

    via_samples = discard_cpp(unvec_frame(apply_samples(vec_frame(add_cpp(s, p)), ch, p), p.n_s), p)
    err = np.max(np.abs(via_samples - apply_block(s, ch, p)))
    assert err < 1e-10, f"dual construction gap {err:.3e}"


def check_effective_factors():
    p = AddmParams(16, 4, 3, 5 / 32, 1 / 1000)
    path = ChannelPath(0.7 - 0.2j, 2, 1.3 / 16)
    err_a = np.max(np.abs(effective.h_a_analytic(path, p) - effective.h_a_brute(path, p)))
    err_d = np.max(np.abs(effective.h_d_analytic(path, p) - effective.h_d_brute(path, p)))
    assert max(err_a, err_d) < 1e-10, f"factor gaps {err_a:.3e}, {err_d:.3e}"


def check_effective_chain():
    p = AddmParams(16, 4, 3, 5 / 32)
    rng = _rng()
    ch = ChannelRealization(tuple(jakes_paths(3, 2.0, p, "II", rng)), 0.0)
    x = rng.standard_normal((16, 4)) + 1j * rng.standard_normal((16, 4))
    z = receive_frame(apply_samples(transmit(x, p), ch, p), p)
    zhat = (effective.h_eff_dense(ch, p) @ x.ravel(order="F")).reshape((16, 4), order="F")
    err = np.max(np.abs(z - zhat))
    assert err < 1e-10, f"effective channel vs chain {err:.3e}"


def check_io_relation():
    p = AddmParams(16, 4, 3, 5 / 32)
    rng = _rng()
    ch = ChannelRealization(tuple(jakes_paths(3, 2.0, p, "I", rng)), 0.0)
    x = rng.standard_normal((16, 4)) + 1j * rng.standard_normal((16, 4))
    want = (effective.h_eff_dense(ch, p) @ x.ravel(order="F")).reshape((16, 4), order="F")
    err = np.max(np.abs(effective.io_relation(x, ch, p) - want))
    assert err < 1e-10, f"scalar relation vs matrix {err:.3e}"


def check_family_reductions():
    p = AddmParams(16, 1, 3, 0.0)
    x = _rng().standard_normal((16, 1)) + 1j * _rng().standard_normal((16, 1))
    ofdm = general_transmit(x, p, preset("CP-OFDM", p))
    ref = np.fft.ifft(x[:, 0], norm="ortho")
    ref = np.concatenate([ref[-3:], ref])
    err = np.max(np.abs(ofdm - ref))
    assert err < 1e-13, f"CP-OFDM vs IDFT+CP {err:.3e}"


def check_mmse():
    x = mmse_equalize(np.array([2.0 + 0j]), np.eye(1), 1.0)
    assert abs(x[0] - 1.0) < 1e-14, f"scalar shrinkage {x[0]}"
    p = AddmParams(8, 2, 2, 1 / 16)
    path = ChannelPath(1.0 + 0j, 1, 1.0 / 8)
    ch = ChannelRealization((path,), 0.0)
    rng = _rng()
    bits = rng.integers(0, 2, 32, dtype=np.uint8)
    x = map_bits(bits, qpsk()).reshape((8, 2), order="F")
    z = receive_frame(apply_samples(transmit(x, p), ch, p), p)
    xhat = mmse_equalize(z.ravel(order="F"), effective.h_eff_dense(ch, p), 1e-12)
    assert np.array_equal(demap_hard(xhat, qpsk()), bits), "noiseless BER not zero"


def check_determinism():
    cfg = SimConfig(waveforms=("addm",), n=8, m=2, n_cp=2, c1=1 / 16,
                    snr_db=(10.0,), frames=20, seed=7)
    a = to_csv(run_ber(cfg))
    b = to_csv(run_ber(cfg))
    assert a == b, "repeated run differs"


CHECKS = (
    ("transform unitarity", check_unitarity),
    ("DFT reduction", check_dft_reduction),
    ("modulation loopback", check_loopback),
    ("channel dual construction", check_channel_duality),
    ("effective-channel factors", check_effective_factors),
    ("effective channel vs chain", check_effective_chain),
    ("scalar io relation", check_io_relation),
    ("family reduction (OFDM)", check_family_reductions),
    ("MMSE detection", check_mmse),
    ("harness determinism", check_determinism),
)


def run() -> int:
    failures = 0
    for name, check in CHECKS:
        try:
            check()
        except Exception as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    print(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return failures


if __name__ == "__main__":
    raise SystemExit(run())
