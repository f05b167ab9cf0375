"""Acceptance criteria, each at its stated size and tolerance.

Every test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, and directly when this file is run as a script.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from bicmbpc.bicm import make_constellation
from bicmbpc.channel import complex_gaussian, sample_channel
from bicmbpc.convcode import ConvCodeSpec, depuncture, viterbi_decode
from bicmbpc.detector import (
    BitMetricRequest,
    MultCounter,
    axis_candidate_count,
    bit_metric_exhaustive,
    bit_metric_exhaustive_axis,
    bit_metric_sd,
    codeword_bit_metric,
    exhaustive_candidate_count,
    prepare,
)
from bicmbpc.linalg import qr
from bicmbpc.probe import diversity_probe, single_symbol_pairs
from bicmbpc.pstbc import encode, make_params
from bicmbpc.sim import SimConfig, estimate_diversity_slope, run_ber_sweep, sample_detector_complexity
from oracles import conv_encode_ref, qam_table

RESULTS: list[str] = []


def record(number: int, name: str, passed: bool, detail: str, t0: float) -> None:
    line = f"{'PASS' if passed else 'FAIL'} [{number:2d}] {name}: {detail} ({time.perf_counter() - t0:.1f} s)"
    RESULTS.append(line)
    print(line)
    assert passed, line


def _lam(rng, d):
    return np.sort(rng.rayleigh(size=d))[::-1] + 1e-6


def _phase(d, g, v):
    return np.array([1.0 if u <= d + 1 - v else g for u in range(1, d + 1)])


# 1 -------------------------------------------------------------------------
def test_01_grouping_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for d in (2, 3, 4, 6):
        p = make_params(d)
        e_pows = [np.linalg.matrix_power(p.shift, k) for k in range(d)]
        for _ in range(1000):
            lam = _lam(rng, d)
            x = complex_gaussian(rng, (d, d))
            z = sum(np.diag(p.generator @ x[:, v]) @ e_pows[v] for v in range(d))
            worst = max(worst, np.abs(encode(p, x) - z).max())
            lz = lam[:, None] * z
            for v in range(1, d + 1):
                got = np.array([lz[u - 1, (u + v - 2) % d] for u in range(1, d + 1)])
                want = _phase(d, p.g, v) * (lam * (p.generator @ x[:, v - 1]))
                worst = max(worst, np.abs(got - want).max())
    record(1, "grouping identity", worst <= 1e-12, f"max abs error {worst:.2e} (tol 1e-12)", t0)


# 2 -------------------------------------------------------------------------
def test_02_r_is_real():
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    worst = 0.0
    for d in (2, 4):
        g = make_params(d).generator
        for _ in range(1000):
            r = qr(sample_channel(d, rng).singular_values[:, None] * g).r
            worst = max(worst, np.abs(r.imag).max() / np.linalg.norm(r))
    record(2, "R real for D=2,4", worst < 1e-9, f"max |Im R|/||R|| {worst:.2e} (tol 1e-9)", t0)


# 3 -------------------------------------------------------------------------
def _axis_oracle(r, yy, levels, bits, n, jj, b):
    """Vectorized brute force over all PAM vectors of one axis."""
    d = len(yy)
    idx = np.array(list(itertools.product(range(len(levels)), repeat=d)))
    keep = bits[idx[:, n], jj] == b
    cand = levels[idx[keep]]
    return float(np.min(np.sum((yy[None] - cand @ r.T) ** 2, axis=1)))


def test_03_sd_exactness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(103)
    worst, count = 0.0, 0
    for d, m, n_inst in ((2, 4, 10_000), (2, 16, 10_000), (2, 64, 10_000), (4, 4, 1000)):
        c = make_constellation(m)
        p = make_params(d)
        levels, bits = np.asarray(c.pam_levels), np.asarray(c.pam_labels)
        for _ in range(n_inst):
            ctx = prepare(_lam(rng, d), p, c)
            y = complex_gaussian(rng, d, float(rng.choice([0.05, 0.5, 2.0])))
            n, j, b = int(rng.integers(d)), int(rng.integers(c.bits_per_symbol)), int(rng.integers(2))
            yy = y.real if j < c.bits_per_axis else y.imag
            want = _axis_oracle(ctx.r, yy, levels, bits, n, j % c.bits_per_axis, b)
            worst = max(worst, abs(bit_metric_sd(ctx, BitMetricRequest(y, n, j, b)) - want))
            count += 1
    record(3, "SD equals exhaustive oracle", worst <= 1e-9,
           f"{count} instances, max deviation {worst:.2e} (tol 1e-9)", t0)


# 4 -------------------------------------------------------------------------
def test_04_metric_reduction():
    t0 = time.perf_counter()
    rng = np.random.default_rng(104)
    d, m = 2, 4
    p, c = make_params(d), make_constellation(m)
    table = list(qam_table(m).items())
    combos = list(itertools.product(range(m), repeat=d * d))
    blocks = np.array([[table[i][1] for i in cmb] for cmb in combos]).reshape(-1, d, d)
    labels = np.array([[table[i][0] for i in cmb] for cmb in combos]).reshape(-1, d, d, 2)
    codewords = np.array([encode(p, x) for x in blocks])
    worst = 0.0
    for _ in range(100):
        lam = _lam(rng, d)
        ctx = prepare(lam, p, c)
        y = lam[:, None] * codewords[rng.integers(len(codewords))] + complex_gaussian(rng, (d, d), 1.0)
        dist = np.sum(np.abs(y[None] - lam[None, :, None] * codewords) ** 2, axis=(1, 2))
        for mm, n, j, b in itertools.product(range(d), range(d), range(2), range(2)):
            want = dist[labels[:, n, mm, j] == b].min()  # M^(D^2)/2 candidates
            for method in ("exhaustive", "sd"):
                worst = max(worst, abs(codeword_bit_metric(ctx, y, mm, n, j, b, method) - want))
    record(4, "codeword metric reduces to group metrics", worst <= 1e-9,
           f"max deviation {worst:.2e} (tol 1e-9)", t0)


# 5 -------------------------------------------------------------------------
def test_05_noise_free_end_to_end():
    t0 = time.perf_counter()
    details, ok = [], True
    for d, rate, m in ((2, "2/3", 4), (2, "2/3", 16), (4, "4/5", 4)):
        cfg = SimConfig(dim=d, m=m, rate=rate, snr_db=(20.0,), noise=False, min_errors=0,
                        max_frames=1000, chunk_frames=100)
        pt = run_ber_sweep(cfg).points[0]
        ok &= pt.frames == 1000 and pt.bit_errors == 0
        details.append(f"D={d} Rc={rate} M={m}: {pt.bit_errors} errors/{pt.frames} frames")
    record(5, "noise-free BER is zero", ok, "; ".join(details), t0)


# 6 -------------------------------------------------------------------------
def test_06_candidate_counts():
    t0 = time.perf_counter()
    rows, ok = [], True
    for d, m in itertools.product((2, 4), (4, 16, 64)):
        c = make_constellation(m)
        ctx = prepare(np.linspace(2.0, 1.0, d), make_params(d), c)
        req = BitMetricRequest(np.zeros(d, complex), d - 1, 0, 1)
        full, axis = MultCounter(), MultCounter()
        bit_metric_exhaustive(ctx, req, full)
        bit_metric_exhaustive_axis(ctx, req, axis)
        side = int(round(np.sqrt(m)))
        good = (full.candidates == m ** d // 2 == exhaustive_candidate_count(m, d)
                and axis.candidates == side ** d // 2 == axis_candidate_count(m, d))
        ok &= good
        rows.append(f"D={d},M={m}:{full.candidates}/{axis.candidates}")
    record(6, "candidate counts M^D/2 and sqrt(M)^D/2", ok, " ".join(rows), t0)


# 7 -------------------------------------------------------------------------
COMPLEXITY_GRID = (0.0, 5.0, 10.0, 15.0, 20.0)


@pytest.mark.parametrize("d,blocks,min_gap", [(2, 2000, 0.3), (4, 24, 1.0)])
def test_07_complexity_ordering(d, blocks, min_gap):
    t0 = time.perf_counter()
    rows, ok = [], True
    gaps = []
    for snr in COMPLEXITY_GRID:
        pc = sample_detector_complexity("bicmb-pc", d, 64, snr, blocks, seed=7).per_metric
        fp = sample_detector_complexity("bicmb-fp", d, 64, snr, blocks, seed=7).per_metric
        gaps.append(np.log10(fp / pc))
        ok &= pc <= fp
        rows.append(f"{snr:g}dB {pc:.1f}/{fp:.1f}")
    ok &= gaps[0] >= min_gap
    record(7, f"complexity PC <= FP, D={d}, M=64", ok,
           f"gap at lowest SNR {gaps[0]:.2f} orders (need >= {min_gap}); "
           f"gap at highest {gaps[-1]:.2f}; mults/metric PC/FP: " + ", ".join(rows), t0)


# 8 -------------------------------------------------------------------------
def test_08_ber_equivalence():
    t0 = time.perf_counter()
    base = SimConfig(dim=2, m=4, rate="2/3", snr_db=(12.0, 14.0), min_errors=1000,
                     max_frames=100_000, chunk_frames=64, seed=8)
    pc = run_ber_sweep(base).points
    fp = run_ber_sweep(base.replace(system="bicmb-fp")).points
    ok, rows = True, []
    for a, b in zip(pc, fp):
        ratio = a.ber / b.ber
        ok &= 1e-4 <= a.ber <= 1e-2 and 1e-4 <= b.ber <= 1e-2
        ok &= a.bit_errors >= 200 and b.bit_errors >= 200 and 0.5 <= ratio <= 2.0
        rows.append(f"{a.snr_db:g}dB PC {a.ber:.2e} ({a.bit_errors} err) "
                    f"FP {b.ber:.2e} ({b.bit_errors} err) ratio {ratio:.2f}")
    record(8, "BER PC vs FP within [0.5, 2]", ok, "; ".join(rows), t0)


# 9 -------------------------------------------------------------------------
@pytest.mark.slow
def test_09_diversity_slope():
    t0 = time.perf_counter()
    cfg = SimConfig(dim=2, m=4, rate="2/3", snr_db=(14.0, 16.0, 18.0, 20.0), min_errors=200,
                    max_frames=1_000_000, chunk_frames=256, seed=9)
    pts = run_ber_sweep(cfg).points
    slope = estimate_diversity_slope(pts)
    ok = slope >= 2.5 and all(p.bit_errors >= 200 for p in pts)
    rows = ", ".join(f"{p.snr_db:g}dB {p.ber:.2e} ({p.bit_errors} err)" for p in pts)
    record(9, "diversity slope D=2", ok, f"slope {slope:.2f} decades/10 dB (need >= 2.5); {rows}", t0)


# 10 ------------------------------------------------------------------------
def test_10_rho1_positive():
    t0 = time.perf_counter()
    c = make_constellation(4)
    mins = {}
    for d in (2, 4):
        p = make_params(d)
        # D=2: every base block; D=4: rho depends on the difference only, so
        # one base with each entry swept over all symbol pairs covers every error
        base = None if d == 2 else np.full((d, d), c.points[0])
        rho1 = [diversity_probe(p, x, xh).rho[0] for x, xh in single_symbol_pairs(d, c, base)]
        mins[d] = min(rho1)
    ok = all(v > 1e-9 for v in mins.values())
    record(10, "rho_1 > 0 for single-symbol errors", ok,
           ", ".join(f"D={d} min {v:.3e}" for d, v in mins.items()), t0)


# 11 ------------------------------------------------------------------------
def test_11_viterbi_optimality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(111)
    codebooks = {}
    bad = 0
    for _ in range(1000):
        rate = str(rng.choice(["1/2", "2/3", "4/5"]))
        k = int(rng.integers(1, 13))
        code = ConvCodeSpec.for_rate(rate)
        key = (rate, k)
        if key not in codebooks:
            words = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8)
            coded = np.array([conv_encode_ref(w) for w in words])
            codebooks[key] = (words, coded[:, code.keep_mask(k + code.tail).reshape(-1)])
        words, coded = codebooks[key]
        met = rng.exponential(size=(coded.shape[1], 2))
        cost = np.where(coded == 1, met[:, 1], met[:, 0]).sum(axis=1)
        got = viterbi_decode(code, depuncture(code, met, k + code.tail))
        gi = int("".join(map(str, got)), 2)
        bad += not np.isclose(cost[gi], cost.min(), rtol=0, atol=1e-12)
    record(11, "Viterbi equals exhaustive minimum", bad == 0, f"{bad}/1000 suboptimal", t0)


if __name__ == "__main__":
    import sys

    failures = 0
    for name, fn in list(globals().items()):
        if not name.startswith("test_"):
            continue
        params = getattr(fn, "pytestmark", [])
        cases = [()]
        for mark in params:
            if mark.name == "parametrize":
                cases = mark.args[1]
        for case in cases:
            try:
                fn(*case)
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
