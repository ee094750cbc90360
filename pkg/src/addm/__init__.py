"""ADDM waveform simulation: transforms, transceiver chain, doubly selective
channels, analytic effective channels, MMSE detection, and a BER harness
whose transmit family also covers OFDM, OCDM, FDDM, OTFS, AFDM, and LFM."""

from .channel import (
    ChannelPath,
    ChannelRealization,
    apply_block,
    apply_samples,
    block_channel_matrix,
    doppler_parts,
    frac_split,
    jakes_paths,
    load_paths,
)
from .detection import Constellation, demap_hard, map_bits, mmse_equalize, qpsk
from .effective import (
    EffectiveChannel,
    affine_kernel,
    doppler_kernel,
    geom_sum,
    h_a_analytic,
    h_a_brute,
    h_d_analytic,
    h_d_brute,
    h_eff,
    h_eff_dense,
    io_relation,
    read_coo,
    write_coo,
)
from .harness import (
    BerResult,
    PointRow,
    SimConfig,
    build_config,
    design_effect,
    emit_csv,
    emit_plot_script,
    intervals_overlap,
    load_config_file,
    load_csv,
    point_interval,
    run_ber,
    snap_c1,
    snr_to_sigma2,
    to_csv,
    wilson_interval,
)
from .transforms import (
    UnitaryTransform,
    chirp_phases,
    daft_entry,
    daft_matrix,
    daft_transform,
    dft_matrix,
    dft_transform,
)
from .waveform import (
    AddmParams,
    FamilyConfig,
    PRESET_NAMES,
    SymbolGrid,
    add_cpp,
    cpp_matrix,
    demodulate,
    discard_cpp,
    general_transmit,
    modulate,
    preset,
    receive_frame,
    transmit,
    transmit_traced,
    unvec_frame,
    vec_frame,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
