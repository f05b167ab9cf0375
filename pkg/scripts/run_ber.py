#!/usr/bin/env python3
"""BER sweep for one config, optionally with the full-precoding baseline alongside.

    python scripts/run_ber.py configs/ber_d2_qam4.yaml --baseline --out results/d2
"""

import argparse
from pathlib import Path

from bicmbpc.cli import load_config
from bicmbpc.sim import run_ber_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--baseline", action="store_true", help="also run system bicmb-fp")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", default="results/ber", help="output prefix")
    args = ap.parse_args()

    cfg = load_config(args.config, workers=args.workers)
    systems = [cfg.system] + (["bicmb-fp"] if args.baseline and cfg.system != "bicmb-fp" else [])
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    reports = {s: run_ber_sweep(cfg.replace(system=s)) for s in systems}
    for s, rep in reports.items():
        rep.write(f"{args.out}_{s}.csv", f"{args.out}_{s}.json")
    print(f"{'snr_db':>7}" + "".join(f"{s:>14}" for s in systems))
    for i, snr in enumerate(cfg.snr_db):
        print(f"{snr:7.1f}" + "".join(f"{reports[s].points[i].ber:14.3e}" for s in systems))


if __name__ == "__main__":
    main()
