"""``atomsim`` command line: ingest, synth, cdf, sim, sweep."""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from atomsim.analysis import format_sweep_csv, format_sweep_json, run_sweep
from atomsim.errors import DomainError, ParseError, PcapFormatError
from atomsim.simcore import Mode, SimConfig, simulate
from atomsim.trace import (
    BIMODAL_CDF,
    MIN_PACKET_BYTES,
    apply_alpha,
    empirical_cdf,
    format_cdf_csv,
    format_size_csv,
    normalize_trace,
    parse_cdf_csv,
    parse_pcap_lengths,
    parse_size_csv,
    synth_trace,
)

DEFAULT_ALPHAS = "0,0.2,1"
DEFAULT_DEPTHS = "1..19"


class CliError(Exception):
    pass


# --- flag types --------------------------------------------------------------


def _positive_int(text):
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _alpha(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in [0, 1], got {text}")
    return value


def _alpha_list(text):
    return [_alpha(part) for part in text.split(",") if part.strip()]


def _depth_list(text):
    """``a..b`` (inclusive) or ``d1,d2,...``."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        lo, hi = _positive_int(lo.strip()), _positive_int(hi.strip())
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty depth range {text!r}")
        return list(range(lo, hi + 1))
    return [_positive_int(part.strip()) for part in text.split(",") if part.strip()]


def _clock_hz(text):
    try:
        ghz = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected GHz as a number, got {text!r}") from None
    hz = round(ghz * 1e9)
    if hz < 1:
        raise argparse.ArgumentTypeError(f"clock must be positive, got {text} GHz")
    return hz


# --- I/O helpers -------------------------------------------------------------


def _write_atomic(path, text):
    """Write via a sibling temp file so a failure never leaves partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text, out):
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        _write_atomic(out, text)


def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}") from None


def _load_trace(path, fmt=None):
    if fmt is None:
        fmt = "pcap" if str(path).lower().endswith((".pcap", ".cap")) else "csv"
    data = _read_bytes(path)
    try:
        if fmt == "pcap":
            return parse_pcap_lengths(data)
        return parse_size_csv(data)
    except (ParseError, PcapFormatError, DomainError) as exc:
        raise CliError(f"{path}: {exc}") from None


def _sim_config(args, **overrides):
    fields = dict(
        chunk_bytes=args.chunk_bytes,
        clock_hz=args.clock_hz,
        min_packet_bytes=args.min_size,
    )
    fields.update(overrides)
    return SimConfig(**fields)


# --- subcommands -------------------------------------------------------------


def cmd_ingest(args):
    trace = _load_trace(args.source, args.format)
    if len(trace) == 0:
        raise CliError(f"{args.source}: no records")
    _emit(format_size_csv(trace), args.out)
    sizes = trace.sizes
    summary = (
        f"records={len(trace)} min={int(sizes.min())} "
        f"mean={sizes.mean():.2f} max={int(sizes.max())}\n"
    )
    # Keep stdout clean for the trace itself when it is written there.
    (sys.stderr if args.out in (None, "-") else sys.stdout).write(summary)


def cmd_synth(args):
    if args.cdf is not None:
        try:
            cdf = parse_cdf_csv(_read_bytes(args.cdf).decode("utf-8"))
        except (ParseError, DomainError, UnicodeDecodeError) as exc:
            raise CliError(f"{args.cdf}: {exc}") from None
    else:
        cdf = list(BIMODAL_CDF)
    trace = synth_trace(cdf, args.n, args.seed)
    _emit(format_size_csv(trace), args.out)


def cmd_cdf(args):
    trace = _load_trace(args.trace, args.format)
    if len(trace) == 0:
        raise CliError(f"{args.trace}: no records")
    _emit(format_cdf_csv(empirical_cdf(trace)), args.out)


def _prepared_trace(args):
    trace = _load_trace(args.trace, args.format)
    if len(trace) == 0:
        raise CliError(f"{args.trace}: no records")
    return normalize_trace(trace, args.min_size)


def cmd_sim(args):
    trace = _prepared_trace(args)
    trace = apply_alpha(trace, args.alpha, args.min_size)
    config = _sim_config(args, depth=args.depth, mode=Mode(args.mode))
    result = simulate(trace, config)
    _emit(json.dumps(result.summary(), indent=2) + "\n", args.out)


def cmd_sweep(args):
    trace = _prepared_trace(args)
    rows = run_sweep(trace, args.alphas, args.depths, _sim_config(args))
    as_json = args.out is not None and str(args.out).lower().endswith(".json")
    text = format_sweep_json(rows) if as_json else format_sweep_csv(rows)
    _emit(text, args.out)


# --- parser ------------------------------------------------------------------


def _add_sim_flags(p):
    p.add_argument("--chunk-bytes", type=_positive_int, default=80,
                   help="bytes read per clock cycle (default 80)")
    p.add_argument("--clock-ghz", dest="clock_hz", type=_clock_hz, default=1_000_000_000,
                   help="clock frequency in GHz (default 1)")
    p.add_argument("--min-size", type=_positive_int, default=MIN_PACKET_BYTES,
                   help="minimum packet size in bytes (default 64)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="atomsim",
        description="Hazard and locking simulator for multi-cycle stateful switch actions.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="convert a pcap or CSV trace to the canonical sizes CSV")
    p.add_argument("source")
    p.add_argument("--format", choices=("pcap", "csv"), help="default: guess from extension")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="sample a synthetic trace from a CDF")
    p.add_argument("--cdf", help="CDF CSV (size_bytes,cum_fraction); default 50/50 64B/1500B")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cdf", help="export a trace's packet-size CDF")
    p.add_argument("trace")
    p.add_argument("--format", choices=("pcap", "csv"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("sim", help="simulate one (alpha, depth, mode) point and print JSON")
    p.add_argument("trace")
    p.add_argument("--format", choices=("pcap", "csv"))
    p.add_argument("--depth", type=_positive_int, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.NONBLOCKING.value)
    p.add_argument("--alpha", type=_alpha, default=1.0)
    p.add_argument("--out")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("sweep", help="run the alpha x depth grid")
    p.add_argument("trace")
    p.add_argument("--format", choices=("pcap", "csv"))
    p.add_argument("--alphas", type=_alpha_list, default=_alpha_list(DEFAULT_ALPHAS))
    p.add_argument("--depths", type=_depth_list, default=_depth_list(DEFAULT_DEPTHS))
    p.add_argument("--out", help="*.json for JSON, anything else for CSV (default stdout CSV)")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, DomainError, ParseError, PcapFormatError) as exc:
        print(f"atomsim {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = exc.filename or ""
        print(f"atomsim {args.subcommand}: error: {name}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
