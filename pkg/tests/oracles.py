"""Independent brute-force references used by the tests.

Nothing here calls the package's detector, decoder or mapper code.
"""

from __future__ import annotations

import itertools

import numpy as np


def gray_pam(levels_per_axis: int):
    """Reflected Gray PAM built from scratch: list of (level, bit-tuple), unnormalized."""
    k = levels_per_axis.bit_length() - 1
    out = []
    for i in range(levels_per_axis):
        g = i ^ (i >> 1)
        bits = tuple((g >> (k - 1 - t)) & 1 for t in range(k))
        out.append((levels_per_axis - 1 - 2 * i, bits))
    return out


def qam_table(m: int):
    """Map label tuple -> unit-energy complex point (real-axis bits first)."""
    side = int(round(np.sqrt(m)))
    pam = gray_pam(side)
    pts = {}
    for (a, ba), (b, bb) in itertools.product(pam, pam):
        pts[ba + bb] = complex(a, b)
    scale = np.sqrt(np.mean([abs(p) ** 2 for p in pts.values()]))
    return {lab: p / scale for lab, p in pts.items()}


def real_axis_metric(r, y, pam_levels, pam_bits, n, jj, b):
    """min ||y - R x||^2 over real x with PAM entries and bit jj of entry n fixed to b."""
    d = len(y)
    best = np.inf
    for idx in itertools.product(range(len(pam_levels)), repeat=d):
        if pam_bits[idx[n]][jj] != b:
            continue
        x = np.array([pam_levels[i] for i in idx])
        best = min(best, float(np.sum((y - r @ x) ** 2)))
    return best


def viterbi_bruteforce(coded_words, metrics):
    """Index of the info word minimizing the summed branch metrics."""
    cost = np.where(coded_words == 1, metrics[:, 1], metrics[:, 0]).sum(axis=1)
    return int(np.argmin(cost))


def conv_encode_ref(bits, gens=(0o133, 0o171), k=7):
    """Shift-register encoder, rate 1/2, zero-terminated, streams interleaved per step.

    The generator MSB taps the current input.
    """
    reg = 0
    out = []
    for u in list(bits) + [0] * (k - 1):
        reg = (reg >> 1) | (int(u) << (k - 1))
        for g in gens:
            out.append(bin(reg & g).count("1") & 1)
    return np.array(out, dtype=np.uint8)
