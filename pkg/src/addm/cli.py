"""Command-line entry point: ber, matrices, and selftest subcommands."""

from __future__ import annotations

import argparse
import logging
import sys

from .channel import ChannelRealization, load_paths
from .effective import h_eff, write_coo
from .harness import build_config, emit_csv, emit_plot_script, load_config_file, run_ber
from .waveform import AddmParams

_CONFIG_FLAGS = (
    "waveform", "case", "n", "m", "n_cp", "c1", "c2",
    "constellation", "snr", "p", "alpha_max", "frames", "seed", "workers",
)


def _add_config_flags(sub) -> None:
    sub.add_argument("--config", help="key = value settings file")
    for key in _CONFIG_FLAGS:
        sub.add_argument(f"--{key.replace('_', '-')}", dest=key)


def _merge_config(args) -> dict:
    values = load_config_file(args.config) if args.config else {}
    for key in _CONFIG_FLAGS:
        override = getattr(args, key)
        if override is not None:
            values[key] = override
    return values


def _cmd_ber(args) -> int:
    cfg = build_config(_merge_config(args))
    result = run_ber(cfg)
    emit_csv(result, args.out)
    print(f"wrote {args.out} ({len(result.rows)} points, {result.wall_time_s:.1f} s)")
    if args.plot_script:
        emit_plot_script(result, args.out, args.plot_script)
        print(f"wrote {args.plot_script}")
    return 0


def _cmd_matrices(args) -> int:
    values = _merge_config(args)
    values.setdefault("frames", "1")  # irrelevant to matrix export; keep config valid
    cfg = build_config(values)
    params = AddmParams(cfg.n, cfg.m, cfg.n_cp, cfg.c1, cfg.c2)
    ch = ChannelRealization(tuple(load_paths(args.path_file)), 0.0)
    eff = h_eff(ch, params, mode=args.mode, k_a=args.k_a, k_f=args.k_f)
    write_coo(args.out, eff)
    print(f"wrote {args.out} ({eff.nnz} entries, size {eff.size}, mode {eff.mode})")
    return 0


def _cmd_selftest(_args) -> int:
    from .selftest import run

    return run()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="addm", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    ber = subs.add_parser("ber", help="Monte Carlo BER sweep")
    _add_config_flags(ber)
    ber.add_argument("--out", default="results.csv", help="CSV output path")
    ber.add_argument("--plot-script", help="also write a matplotlib plotting script here")
    ber.set_defaults(func=_cmd_ber)

    mat = subs.add_parser("matrices", help="export an effective channel in coordinate form")
    _add_config_flags(mat)
    mat.add_argument("--path-file", required=True, help="text file of channel paths")
    mat.add_argument("--mode", default="full", choices=("full", "exact", "trunc"))
    mat.add_argument("--k-a", type=int, default=2, help="affine half-width for trunc mode")
    mat.add_argument("--k-f", type=int, default=2, help="block half-width for trunc mode")
    mat.add_argument("--out", default="heff.coo", help="coordinate file output path")
    mat.set_defaults(func=_cmd_matrices)

    st = subs.add_parser("selftest", help="run the built-in property checks")
    st.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a clean one-line failure, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
