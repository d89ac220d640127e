"""Command-line interface: BSR queries, gain maps, sweeps, and single runs.

Exit codes: 0 on success, 1 on configuration errors, 2 on runtime numeric
errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .arrays import ArrayGeometry, FrequencyGrid, bsr_closed_form, bsr_numerical
from .channel import dump_channel, frequency_channel, sample_paths
from .harness import (
    ConfigError,
    ExperimentConfig,
    config_from_values,
    derive_trial_seed,
    emit_csv,
    gain_map_table,
    parse_config_file,
    run_bandwidth_sweep,
    run_rsi_sweep,
    run_single,
    run_snr_sweep,
    write_gain_map_csv,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; bad usage is a config error
        raise ConfigError(message)


def _add_grid_args(parser, subcarriers_default=128):
    parser.add_argument("--rx", default="16x16", help="receive shape, e.g. 16x16")
    parser.add_argument("--spacing", type=float, default=0.5, help="normalized antenna spacing")
    parser.add_argument("--carrier", type=float, default=300e9, help="carrier frequency in Hz")
    parser.add_argument("--bandwidth", type=float, default=30e9, help="bandwidth in Hz")
    parser.add_argument("--subcarriers", type=int, default=subcarriers_default)


def _add_run_args(parser):
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--seed", type=int, help="64-bit master seed (overrides config)")
    parser.add_argument("--trials", type=int, help="Monte-Carlo trials (overrides config)")
    parser.add_argument("--out", default="results.csv", help="output CSV path")
    parser.add_argument("--threads", type=int, default=1, help="trial worker threads")
    parser.add_argument(
        "--paper-scale",
        action="store_true",
        help="full-scale preset (128 subcarriers, 1000 trials, large arrays); slow",
    )


def _parse_geometry(text: str, spacing: float) -> ArrayGeometry:
    try:
        h, v = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"cannot parse shape {text!r}; expected like '16x16'") from None
    return ArrayGeometry(h, v, spacing, spacing)


def _load_config(args, sweep: str) -> ExperimentConfig:
    values = parse_config_file(args.config) if args.config else {}
    config = config_from_values(values)
    if args.seed is not None:
        config.seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
    if args.paper_scale:
        config = config.as_paper_scale(sweep)
    return config


def _cmd_bsr(args) -> int:
    geom = _parse_geometry(args.rx, args.spacing)
    grid = FrequencyGrid(args.carrier, args.bandwidth, args.subcarriers)
    print(f"closed_form {bsr_closed_form(geom, grid.fractional_bandwidth):.12g}")
    print(f"numerical {bsr_numerical(geom, grid):.12g}")
    return 0


def _cmd_gain_map(args) -> int:
    geom = _parse_geometry(args.rx, args.spacing)
    grid = FrequencyGrid(args.carrier, args.bandwidth, args.subcarriers)
    try:
        beam = tuple(float(part) for part in args.beam.split(","))
        if len(beam) != 2:
            raise ValueError
    except ValueError:
        raise ConfigError(f"cannot parse --beam {args.beam!r}; expected 'H,V'") from None
    labels = tuple(part.strip() for part in args.frequencies.split(",") if part.strip())
    coords, tables = gain_map_table(geom, args.resolution, grid, labels, beam)
    write_gain_map_csv(coords, tables, grid.carrier_hz, args.out)
    print(f"wrote {len(tables) * coords.size ** 2} gain samples to {args.out}")
    return 0


def _run_sweep(args, sweep: str, runner) -> int:
    config = _load_config(args, sweep)
    rows = runner(config, threads=args.threads)
    emit_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_run(args) -> int:
    config = _load_config(args, "single")
    rows = run_single(config, threads=args.threads)
    emit_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.dump_channel:
        seed = derive_trial_seed(config.seed, 0, 0)
        rng = np.random.default_rng(seed)
        grid = config.grid()
        paths = sample_paths(rng, config.n_paths, config.delay_taps, grid.sample_period_s)
        channel = frequency_channel(
            paths,
            config.rx_geometry(),
            config.tx_geometry(),
            grid,
            grid.sample_period_s,
            config.delay_taps,
            config.rolloff,
        )
        dump_path = args.out + ".channel.txt"
        with open(dump_path, "w", encoding="utf-8") as handle:
            dump_channel(channel, handle)
        print(f"dumped trial-0 channel to {dump_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="squintsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bsr", help="print closed-form and numerical beam squint ratio")
    _add_grid_args(p)
    p.set_defaults(handler=_cmd_bsr)

    p = sub.add_parser("gain-map", help="tabulate a matched beam's gain over directions")
    _add_grid_args(p)
    p.add_argument("--beam", default="0.5,0.5", help="beam spatial coordinates 'H,V'")
    p.add_argument("--resolution", type=int, default=201, help="grid points per axis")
    p.add_argument("--frequencies", default="min,center,max")
    p.add_argument("--out", default="gain_map.csv")
    p.set_defaults(handler=_cmd_gain_map)

    for name, runner in (
        ("sweep-rsi", run_rsi_sweep),
        ("sweep-snr", run_snr_sweep),
        ("sweep-bandwidth", run_bandwidth_sweep),
    ):
        p = sub.add_parser(name, help=f"run the {name.split('-')[1]} sweep")
        _add_run_args(p)
        p.set_defaults(handler=lambda args, r=runner, n=name: _run_sweep(args, n.split("-")[1], r))

    p = sub.add_parser("run", help="run the configured operating point")
    _add_run_args(p)
    p.add_argument(
        "--dump-channel",
        action="store_true",
        help="also write the trial-0 channel matrices as text next to the CSV",
    )
    p.set_defaults(handler=_cmd_run)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError, OSError, np.linalg.LinAlgError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
