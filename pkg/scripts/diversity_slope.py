#!/usr/bin/env python3
"""High-SNR BER slope (decades per 10 dB) for D=2, 4-QAM, rate 2/3.

Full diversity at D=2 is 4; anything above 2.5 on a short window is
consistent with it.  Expect tens of minutes on one core.
"""

import argparse

from bicmbpc.sim import SimConfig, estimate_diversity_slope, run_ber_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--snr-db", type=float, nargs="+", default=[14, 16, 18, 20])
    ap.add_argument("--min-errors", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--system", default="bicmb-pc")
    args = ap.parse_args()

    cfg = SimConfig(system=args.system, dim=2, m=4, rate="2/3", snr_db=tuple(args.snr_db),
                    min_errors=args.min_errors, max_frames=1_000_000, chunk_frames=256,
                    workers=args.workers)
    rep = run_ber_sweep(cfg)
    for p in rep.points:
        print(f"{p.snr_db:6.1f} dB  BER {p.ber:.3e}  ({p.bit_errors} errors, {p.frames} frames)")
    print(f"slope {estimate_diversity_slope(rep.points):.2f} decades / 10 dB")


if __name__ == "__main__":
    main()
