"""Command line interface.

Subcommands:
  synth     write a waveform file (raw float32 I/Q + .meta sidecar)
  identify  classify a waveform file, or synthesize one inline, and print
            the decision record
  sweep     run a Monte-Carlo experiment config; write CSV and optionally a
            figure

Exit codes: 0 success, 1 configuration error, 2 runtime/numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from .channel import add_awgn
from .detector import DetectorConfig, identify
from .errors import ConfigError
from .harness import emit_csv, load_config, run_experiment
from .iqfile import read_signal, write_signal
from .waveforms import (OfdmConfig, ScConfig, Scheme, generate_ofdm, generate_sc)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; bad args are config errors
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _add_waveform_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", required=True,
                   choices=["ofdm", "psk", "fsk", "qam"], help="waveform family")
    p.add_argument("--order", type=int, default=32, help="modulation order")
    p.add_argument("--symbols", type=int, default=1024, help="symbol count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-rate", type=float, default=1.0e6, help="metadata only [Hz]")
    p.add_argument("--sps", type=int, default=4, help="single-carrier samples per symbol")
    p.add_argument("--carriers", type=int, default=64, help="multicarrier active bins")


def _synthesize(args) -> tuple:
    if args.scheme == "ofdm":
        cfg = OfdmConfig(active_carriers=args.carriers, modulation_order=args.order,
                         n_symbols=args.symbols, seed=args.seed)
        sig = generate_ofdm(cfg)
        meta = {"scheme": "OFDM", "order": args.order, "n_symbols": args.symbols,
                "seed": args.seed}
    else:
        cfg = ScConfig(scheme=Scheme(args.scheme.upper()), modulation_order=args.order,
                       samples_per_symbol=args.sps, n_symbols=args.symbols,
                       seed=args.seed)
        sig = generate_sc(cfg)
        meta = {"scheme": "SC-" + args.scheme.upper(), "order": args.order,
                "n_symbols": args.symbols, "seed": args.seed}
    sig.sample_rate = args.sample_rate
    return sig, meta


def _cmd_synth(args) -> int:
    sig, meta = _synthesize(args)
    write_signal(args.out, sig, meta)
    print("wrote %d samples to %s" % (len(sig), args.out))
    return 0


def _cmd_identify(args) -> int:
    if args.input:
        sig, _ = read_signal(args.input)
    elif args.scheme:
        sig, _ = _synthesize(args)
        if args.snr is not None and not math.isinf(args.snr):
            sig = add_awgn(sig, args.snr, args.seed + 1)
    else:
        raise ConfigError("identify needs a waveform file or --scheme for inline synthesis")
    cfg = DetectorConfig(significance=args.alpha, m_lags=args.lags, k_n=args.kn)
    decision = identify(sig, cfg)
    print(decision.summary_line())
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    result = run_experiment(cfg)
    emit_csv(result, args.out)
    print("wrote %d rows to %s" % (len(result.rows), args.out))
    if args.plot:
        from .plotting import render_sweep_plot

        render_sweep_plot(result, args.plot)
        print("wrote figure to %s" % args.plot)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ofdmid",
                     description="multicarrier vs. single-carrier identification")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="write a waveform file")
    _add_waveform_args(p)
    p.add_argument("--out", required=True, help="output I/Q path")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("identify", help="classify a record")
    p.add_argument("input", nargs="?", help="waveform file (omit for inline synthesis)")
    p.add_argument("--scheme", choices=["ofdm", "psk", "fsk", "qam"])
    p.add_argument("--order", type=int, default=32)
    p.add_argument("--symbols", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-rate", type=float, default=1.0e6)
    p.add_argument("--sps", type=int, default=4)
    p.add_argument("--carriers", type=int, default=64)
    p.add_argument("--snr", type=float, default=None, help="add AWGN at this SNR [dB]")
    p.add_argument("--alpha", type=float, default=0.01, help="false-alarm target")
    p.add_argument("--lags", type=int, default=None, help="cumulant lag span")
    p.add_argument("--kn", type=int, default=None, help="covariance truncation")
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("sweep", help="run an experiment config")
    p.add_argument("--config", required=True, help="YAML experiment file")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--plot", default=None, help="optional figure path (png/pdf)")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 -- CLI boundary
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
