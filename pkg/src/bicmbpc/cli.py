"""Command line entry point: ``bicmbpc {ber,complexity,probe,selftest}``.

Exit status is 0 on success, 1 for configuration errors and 2 when an
internal consistency check fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from .bicm import make_constellation
from .errors import ConfigError, InternalConsistencyError, InvalidInputError
from .probe import probe_summary
from .pstbc import make_params
from .sim import SimConfig, run_ber_sweep, run_complexity_sweep

log = logging.getLogger("bicmbpc")

EXIT_OK, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2


def load_config(path: str | None, **overrides) -> SimConfig:
    data = {}
    if path:
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a mapping")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig.from_dict(data)


def _print_report(report) -> None:
    cfg = report.config
    print(f"# {cfg.system} D={cfg.dim} M={cfg.m} Rc={cfg.rate} detector={cfg.detector}")
    print(f"{'snr_db':>7} {'ber':>11} {'errors':>8} {'bits':>11} {'mults/metric':>13} {'prep':>8}")
    for p in report.points:
        print(f"{p.snr_db:7.2f} {p.ber:11.4e} {p.bit_errors:8d} {p.bits:11d} "
              f"{p.avg_real_mults_per_bit_metric:13.2f} {p.amortized_prep_mults:8.2f}")
    print(f"# wall time {report.wall_time:.1f} s, build {report.build}")


def _cmd_sweep(args, runner) -> int:
    cfg = load_config(args.config, seed=args.seed, workers=args.workers)
    report = runner(cfg)
    _print_report(report)
    report.write(args.out, args.json)
    return EXIT_OK


def _cmd_probe(args) -> int:
    try:
        params = make_params(args.dim)
        const = make_constellation(args.m)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc
    summary = probe_summary(params, const, exhaustive=args.exhaustive)
    for k, v in summary.items():
        print(f"{k:>12}: {v}")
    if args.json:
        Path(args.json).write_text(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = run_selftest(long=args.long, seed=args.seed or 0)
    return EXIT_OK if ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bicmbpc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, hlp in (("ber", "BER vs SNR sweep"), ("complexity", "multiplications per bit metric")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--config", help="YAML/JSON file with SimConfig fields")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--json", help="JSON output path")

    p = sub.add_parser("probe", help="rho weights over single-symbol error pairs")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--exhaustive", action="store_true", help="sweep every base block too")
    p.add_argument("--json")

    p = sub.add_parser("selftest", help="run the invariant checks")
    p.add_argument("--long", action="store_true", help="include the diversity-slope run")
    p.add_argument("--seed", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        if args.command == "ber":
            return _cmd_sweep(args, run_ber_sweep)
        if args.command == "complexity":
            return _cmd_sweep(args, run_complexity_sweep)
        if args.command == "probe":
            return _cmd_probe(args)
        return _cmd_selftest(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
