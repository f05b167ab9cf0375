"""Reduced-size invariant checks behind ``bicmbpc selftest``.

Each check compares a fast path against an independent brute-force
evaluation and returns ``(passed, detail)``.
"""

from __future__ import annotations

import itertools
import time

import numpy as np

from .bicm import make_constellation
from .channel import complex_gaussian, sample_channel
from .convcode import ConvCodeSpec, conv_encode, depuncture, viterbi_decode
from .detector import (
    MultCounter,
    BitMetricRequest,
    bit_metric_exhaustive,
    bit_metric_exhaustive_axis,
    bit_metric_sd,
    codeword_bit_metric,
    prepare,
)
from .probe import probe_summary
from .pstbc import encode, group_positions, make_params, phase_matrix
from .sim import SimConfig, estimate_diversity_slope, run_ber_sweep


def _random_lambda(rng, d):
    return np.sort(rng.rayleigh(1.0, d))[::-1] + 1e-3


def check_grouping(rng, n=100):
    worst = 0.0
    for d in (2, 3, 4, 6):
        p = make_params(d)
        for _ in range(n):
            lam = _random_lambda(rng, d)
            x = complex_gaussian(rng, (d, d))
            lz = lam[:, None] * encode(p, x)
            for v in range(1, d + 1):
                got = np.array([lz[a - 1, b - 1] for a, b in group_positions(d, v)])
                want = phase_matrix(p, v) @ (lam * (p.generator @ x[:, v - 1]))
                worst = max(worst, np.abs(got - want).max())
    return worst <= 1e-12, f"max error {worst:.2e}"


def check_realness(rng, n=100):
    worst = 0.0
    for d in (2, 4):
        p = make_params(d)
        c = make_constellation(4)
        for _ in range(n):
            ctx = prepare(sample_channel(d, rng).singular_values, p, c)
            worst = max(worst, np.abs(np.imag(ctx.r)).max() / np.linalg.norm(ctx.r))
    return worst < 1e-9, f"max |Im R|/||R|| {worst:.2e}"


def check_sd(rng, n=200):
    worst = 0.0
    for d, m in ((2, 4), (2, 16), (2, 64), (4, 4)):
        p, c = make_params(d), make_constellation(m)
        for _ in range(n if d == 2 else n // 4):
            ctx = prepare(sample_channel(d, rng).singular_values, p, c)
            y = complex_gaussian(rng, d, 2.0)
            req = BitMetricRequest(y, int(rng.integers(d)), int(rng.integers(c.bits_per_symbol)),
                                   int(rng.integers(2)))
            worst = max(worst, abs(bit_metric_sd(ctx, req) - bit_metric_exhaustive_axis(ctx, req)))
    return worst <= 1e-9, f"max |SD - exhaustive| {worst:.2e}"


def check_metric_reduction(rng, n=5):
    d, c = 2, make_constellation(4)
    p = make_params(d)
    blocks = np.array(list(itertools.product(c.points, repeat=d * d))).reshape(-1, d, d)
    labels = np.array(list(itertools.product(range(4), repeat=d * d))).reshape(-1, d, d)
    z = np.array([encode(p, x) for x in blocks])
    worst = 0.0
    for _ in range(n):
        ch = sample_channel(d, rng)
        lam = ch.singular_values
        ctx = prepare(lam, p, c)
        y = lam[:, None] * encode(p, blocks[rng.integers(len(blocks))]) + complex_gaussian(rng, (d, d))
        dist = np.sum(np.abs(y - lam[None, :, None] * z) ** 2, axis=(1, 2))
        for m, nn, j, b in itertools.product(range(d), range(d), range(2), range(2)):
            sel = c.labels[labels[:, nn, m], j] == b
            worst = max(worst, abs(dist[sel].min() - codeword_bit_metric(ctx, y, m, nn, j, b)))
    return worst <= 1e-9, f"max deviation {worst:.2e}"


def check_noise_free(frames=16):
    total = 0
    for dim, rate, m in ((2, "2/3", 4), (2, "2/3", 16), (4, "4/5", 4)):
        cfg = SimConfig(dim=dim, m=m, rate=rate, snr_db=(10.0,), noise=False, min_errors=0,
                        max_frames=frames, chunk_frames=frames)
        total += run_ber_sweep(cfg).points[0].bit_errors
    return total == 0, f"{total} bit errors"


def check_candidate_counts():
    bad = []
    for d, m in itertools.product((2, 4), (4, 16, 64)):
        c = make_constellation(m)
        ctx = prepare(np.linspace(2.0, 1.0, d), make_params(d), c)
        y = np.zeros(d, complex)
        side = int(np.sqrt(m))
        cnt = MultCounter()
        bit_metric_exhaustive_axis(ctx, BitMetricRequest(y, 0, 0, 0), cnt)
        if cnt.candidates != side ** d // 2:
            bad.append((d, m, "axis"))
        if m ** d <= 1 << 16:
            cnt = MultCounter()
            bit_metric_exhaustive(ctx, BitMetricRequest(y, 0, 0, 0), cnt)
            if cnt.candidates != m ** d // 2:
                bad.append((d, m, "full"))
    return not bad, f"mismatches {bad}" if bad else "M^D/2 and sqrt(M)^D/2 confirmed"


def check_rho():
    worst = np.inf
    for d in (2, 4):
        s = probe_summary(make_params(d), make_constellation(4), exhaustive=(d == 2))
        worst = min(worst, s["min_rho1"])
    return worst > 1e-9, f"min rho_1 {worst:.3e}"


def check_viterbi(rng, n=50):
    code = ConvCodeSpec.for_rate("2/3")
    k = 8
    words = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8)
    coded = conv_encode(code, words)
    bad = 0
    for _ in range(n):
        met = rng.random((coded.shape[1], 2))
        cost = np.where(coded == 1, met[:, 1], met[:, 0]).sum(axis=1)
        best = words[np.argmin(cost)]
        got = viterbi_decode(code, depuncture(code, met, k + code.tail))
        bad += not np.array_equal(got, best)
    return bad == 0, f"{bad}/{n} mismatches"


def check_slope():
    cfg = SimConfig(dim=2, m=4, rate="2/3", snr_db=(14.0, 16.0, 18.0, 20.0), min_errors=200,
                    max_frames=1_000_000, chunk_frames=256)
    slope = estimate_diversity_slope(run_ber_sweep(cfg).points)
    return slope >= 2.5, f"slope {slope:.2f} decades/10 dB"


def run_selftest(long: bool = False, seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    checks = [
        ("grouping identity", lambda: check_grouping(rng)),
        ("R real for D=2,4", lambda: check_realness(rng)),
        ("SD equals exhaustive", lambda: check_sd(rng)),
        ("codeword metric reduction", lambda: check_metric_reduction(rng)),
        ("noise-free chain", check_noise_free),
        ("candidate counts", check_candidate_counts),
        ("rho_1 positivity", check_rho),
        ("Viterbi optimality", lambda: check_viterbi(rng)),
    ]
    if long:
        checks.append(("diversity slope", check_slope))
    ok = True
    for name, fn in checks:
        t0 = time.perf_counter()
        passed, detail = fn()
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name:<28} {detail}  ({time.perf_counter() - t0:.1f} s)")
    return ok
