import numpy as np
import pytest

from addm.transforms import daft_matrix, dft_matrix
from addm.waveform import (
    AddmParams,
    PRESET_NAMES,
    SymbolGrid,
    add_cpp,
    cpp_matrix,
    demodulate,
    discard_cpp,
    general_transmit,
    modulate,
    prefix_phases,
    preset,
    rcp_matrix,
    receive_frame,
    transmit,
    transmit_traced,
    unvec_frame,
    vec_frame,
)


def random_grid(n, m, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


class TestAddmParams:
    def test_derived_lengths(self):
        p = AddmParams(32, 8, 4, 1 / 8)
        assert p.n_s == 36
        assert p.frame_len == 288

    @pytest.mark.parametrize("bad", [dict(n=0), dict(m=0), dict(n_cp=-1), dict(n_cp=17)])
    def test_rejects_bad_dimensions(self, bad):
        kwargs = dict(n=16, m=2, n_cp=3, c1=0.0)
        kwargs.update(bad)
        with pytest.raises(ValueError):
            AddmParams(**kwargs)

    def test_prefix_may_be_zero_or_full(self):
        AddmParams(16, 2, 0, 0.0)
        AddmParams(16, 2, 16, 0.0)


class TestModulation:
    def test_loopback_without_prefix(self):
        p = AddmParams(16, 4, 0, 3 / 32, 0.002)
        x = random_grid(16, 4)
        assert np.max(np.abs(demodulate(modulate(x, p), p) - x)) < 1e-13

    def test_energy_preserved(self):
        p = AddmParams(16, 4, 0, 3 / 32, 0.002)
        x = random_grid(16, 4, seed=1)
        s = modulate(x, p)
        assert abs(np.linalg.norm(s) - np.linalg.norm(x)) < 1e-10

    def test_symbol_grid_domain_checked(self):
        p = AddmParams(8, 2, 0, 0.0)
        grid = SymbolGrid(random_grid(8, 2), "TD")
        with pytest.raises(ValueError):
            modulate(grid, p)

    def test_shape_checked(self):
        p = AddmParams(8, 2, 0, 0.0)
        with pytest.raises(ValueError):
            modulate(np.zeros((8, 3)), p)


class TestPrefix:
    def test_zero_rate_is_plain_cyclic_prefix(self):
        p = AddmParams(8, 2, 3, 0.0)
        s = random_grid(8, 2)
        ext = add_cpp(s, p)
        assert np.allclose(ext[:3], s[-3:], atol=1e-15)
        assert np.allclose(ext[3:], s, atol=1e-15)

    def test_prefix_rows_carry_chirp_phase(self):
        p = AddmParams(8, 2, 3, 5 / 64)
        s = random_grid(8, 2, seed=2)
        ext = add_cpp(s, p)
        phases = prefix_phases(8, 3, 5 / 64)
        for i, g in enumerate(range(-3, 0)):
            expected = s[8 + g] * phases[i]
            assert np.max(np.abs(ext[i] - expected)) < 1e-14

    def test_discard_inverts_add(self):
        p = AddmParams(8, 2, 3, 5 / 64)
        s = random_grid(8, 2, seed=3)
        assert np.array_equal(discard_cpp(add_cpp(s, p), p), s)

    def test_matrix_form_agrees(self):
        p = AddmParams(8, 2, 3, 5 / 64)
        s = random_grid(8, 2, seed=4)
        assert np.max(np.abs(cpp_matrix(p) @ s - add_cpp(s, p))) < 1e-14

    def test_prefix_makes_block_chirp_periodic(self):
        # the extended block continues the chirp-periodic extension of the
        # unprefixed block: sample g and sample g + n differ by the prefix
        # phase law
        p = AddmParams(8, 1, 8, 3 / 16)
        x = random_grid(8, 1, seed=5)
        ext = add_cpp(modulate(x, p), p)[:, 0]
        phases = prefix_phases(8, 8, 3 / 16)
        for g in range(8):
            assert abs(ext[g] - ext[g + 8] * phases[g]) < 1e-13


class TestSerialization:
    def test_column_major_round_trip(self):
        s = random_grid(6, 3)
        v = vec_frame(s)
        assert np.array_equal(v[:6], s[:, 0])
        assert np.array_equal(unvec_frame(v, 6), s)

    def test_unvec_rejects_ragged_length(self):
        with pytest.raises(ValueError):
            unvec_frame(np.zeros(7), 3)


class TestTransmitReceive:
    def test_loopback(self):
        p = AddmParams(32, 8, 4, 0.125, 0.0001)
        x = random_grid(32, 8, seed=6)
        assert np.max(np.abs(receive_frame(transmit(x, p), p) - x)) < 1e-12

    def test_traced_stages_consistent(self):
        p = AddmParams(16, 4, 3, 1 / 8)
        x = random_grid(16, 4, seed=7)
        serial, trace = transmit_traced(x, p)
        assert np.array_equal(serial, transmit(x, p))
        assert np.allclose(trace.ta, x @ dft_matrix(4).conj().T, atol=1e-14)
        assert np.allclose(trace.td, daft_matrix(16, 1 / 8, 0.0).conj().T @ trace.ta, atol=1e-14)
        assert trace.with_prefix.shape == (19, 4)


class TestPresets:
    def test_all_names_resolve(self):
        p1 = AddmParams(16, 1, 3, 1 / 8)
        pm = AddmParams(16, 4, 3, 1 / 8)
        for name in PRESET_NAMES:
            params = p1 if name in ("CP-AFDM", "CP-OFDM", "CP-OCDM", "LFM") else pm
            fam = preset(name, params)
            assert fam.name == name

    def test_single_column_presets_reject_multiblock(self):
        pm = AddmParams(16, 4, 3, 1 / 8)
        for name in ("CP-AFDM", "CP-OFDM", "CP-OCDM", "LFM"):
            with pytest.raises(ValueError):
                preset(name, pm)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            preset("CP-XYZ", AddmParams(16, 1, 3, 0.0))

    def test_ocdm_ties_all_rates_to_half_inverse_length(self):
        fam = preset("CP-OCDM", AddmParams(16, 1, 3, 0.9))
        assert fam.fwd_c1 == fam.fwd_c2 == fam.cp_c1 == 1 / 32

    def test_rcp_length_defaults_to_n_cp(self):
        p = AddmParams(16, 4, 3, 0.0)
        assert preset("RCP-OTFS", p).rcp_len == 3
        assert preset("RCP-OTFS", p, rcp_len=5).rcp_len == 5


class TestFamilyTransmit:
    def test_native_chain_is_the_addm_preset(self):
        p = AddmParams(16, 4, 3, 5 / 32, 0.0007)
        x = random_grid(16, 4, seed=8)
        fam = preset("CP-ADDM", p)
        assert np.array_equal(general_transmit(x, p, fam), transmit(x, p))

    def test_afdm_single_column_hand_coded(self):
        p = AddmParams(16, 1, 3, 5 / 32, 0.0007)
        x = random_grid(16, 1, seed=9)
        fam = preset("CP-AFDM", p)
        body = daft_matrix(16, 5 / 32, 0.0007).conj().T @ x[:, 0]
        pre = body[-3:] * np.exp(-2j * np.pi * (5 / 32) * (16.0**2 + 2 * 16 * np.arange(-3, 0)))
        expected = np.concatenate([pre, body])
        assert np.max(np.abs(general_transmit(x, p, fam) - expected)) < 1e-14

    def test_ofdm_is_idft_plus_plain_prefix(self):
        p = AddmParams(16, 1, 4, 5 / 32)  # params chirp rate must not leak in
        x = random_grid(16, 1, seed=10)
        fam = preset("CP-OFDM", p)
        body = np.fft.ifft(x[:, 0], norm="ortho")
        expected = np.concatenate([body[-4:], body])
        assert np.max(np.abs(general_transmit(x, p, fam) - expected)) < 1e-14

    def test_otfs_skips_row_transform(self):
        p = AddmParams(8, 4, 2, 0.0)
        x = random_grid(8, 4, seed=11)
        fam = preset("CP-OTFS", p)
        body = x @ dft_matrix(4).conj().T
        expected = vec_frame(np.vstack([body[-2:], body]))
        assert np.max(np.abs(general_transmit(x, p, fam) - expected)) < 1e-14

    def test_rcp_otfs_prepends_frame_tail(self):
        p = AddmParams(8, 4, 2, 0.0)
        x = random_grid(8, 4, seed=12)
        fam = preset("RCP-OTFS", p)
        body = vec_frame(x @ dft_matrix(4).conj().T)
        out = general_transmit(x, p, fam)
        assert out.size == body.size + 2
        assert np.array_equal(out[:2], body[-2:])
        assert np.array_equal(out[2:], body)

    def test_rcp_matrix_matches(self):
        m = rcp_matrix(6, 2)
        v = np.arange(6.0)
        assert np.array_equal(m @ v, np.concatenate([v[-2:], v]))

    def test_lfm_is_a_single_chirp(self):
        p = AddmParams(16, 1, 0, 5 / 32)
        fam = preset("LFM", p)
        x = np.array([[np.exp(0.3j)]])  # unit-energy symbol
        n = np.arange(16)
        expected = x[0, 0] * np.exp(2j * np.pi * (5 / 32) * n**2) / 4.0
        assert np.max(np.abs(general_transmit(x, p, fam) - expected)) < 1e-14

    def test_fddm_prefix_keeps_chirp_rate(self):
        # plain IDFT body, but the prefix carries the params' chirp phase
        p = AddmParams(16, 2, 3, 5 / 32)
        x = random_grid(16, 2, seed=13)
        fam = preset("CP-FDDM", p)
        out = unvec_frame(general_transmit(x, p, fam), p.n_s)
        body = np.fft.ifft(x @ dft_matrix(2).conj().T, axis=0, norm="ortho")
        assert np.max(np.abs(out[3:] - body)) < 1e-13
        pre = body[-3:] * prefix_phases(16, 3, 5 / 32)[:, None]
        assert np.max(np.abs(out[:3] - pre)) < 1e-13

    def test_shape_validated_against_valid_len(self):
        p = AddmParams(16, 1, 0, 5 / 32)
        fam = preset("LFM", p)
        with pytest.raises(ValueError):
            general_transmit(np.zeros((16, 1)), p, fam)
