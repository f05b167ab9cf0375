"""Depth-first sphere decoders for upper-triangular systems.

Both kernels return the exact minimum of ``||y - R x||^2`` over a
Cartesian product alphabet, starting from an infinite radius and
shrinking it to the best leaf found so far.  Children of a node are
visited in Schnorr-Euchner order (non-decreasing distance to the layer
centre), so the first child that fails the radius test ends the layer.
The last layer is sliced: only its nearest admissible point is scored.

Real multiplications are tallied into a :class:`SearchStats`:

* real kernel: one per off-diagonal product in the layer centre, one for
  the reciprocal diagonal, two per scored child (square, times ``r_ll^2``);
* complex kernel: four per complex off-diagonal product, two for the real
  reciprocal diagonal, one per axis distance when a layer is expanded,
  one per visited child (times ``r_ll^2``), three for a sliced leaf.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from math import inf

__all__ = ["SearchStats", "search_real", "search_complex", "nearest", "zigzag"]


@dataclass
class SearchStats:
    mults: int = 0
    nodes: int = 0
    leaves: int = 0

    def __iadd__(self, other: "SearchStats") -> "SearchStats":
        self.mults += other.mults
        self.nodes += other.nodes
        self.leaves += other.leaves
        return self


def nearest(levels, c: float) -> float:
    """Slicer: closest entry of the ascending sequence ``levels`` to ``c``."""
    i = bisect_left(levels, c)
    if i == 0:
        return levels[0]
    if i == len(levels):
        return levels[-1]
    lo, hi = levels[i - 1], levels[i]
    return lo if c - lo <= hi - c else hi


def zigzag(levels, c: float):
    """Yield ``levels`` (ascending) by non-decreasing distance to ``c``."""
    hi = bisect_left(levels, c)
    lo = hi - 1
    n = len(levels)
    while lo >= 0 or hi < n:
        if hi >= n or (lo >= 0 and c - levels[lo] <= levels[hi] - c):
            yield levels[lo]
            lo -= 1
        else:
            yield levels[hi]
            hi += 1


def search_real(r, y, alphabets, stats: SearchStats):
    """Minimize ``||y - R x||^2`` with ``x[l]`` in ``alphabets[l]``.

    ``r`` is a real upper-triangular matrix as nested lists, ``alphabets``
    are ascending tuples.  Returns ``(distance, x)``.
    """
    d = len(y)
    inv = [1.0 / r[l][l] for l in range(d)]
    r2 = [r[l][l] * r[l][l] for l in range(d)]
    x = [0.0] * d
    best = [inf, None]

    def expand(l, partial):
        s = y[l]
        row = r[l]
        for k in range(l + 1, d):
            s -= row[k] * x[k]
        stats.mults += d - l
        c = s * inv[l]
        stats.nodes += 1
        if l == 0:
            a = nearest(alphabets[0], c)
            e = c - a
            total = partial + r2[0] * e * e
            stats.mults += 2
            stats.leaves += 1
            if total < best[0]:
                x[0] = a
                best[0] = total
                best[1] = list(x)
            return
        for a in zigzag(alphabets[l], c):
            e = c - a
            pd = partial + r2[l] * e * e
            stats.mults += 2
            if pd >= best[0]:
                break
            x[l] = a
            expand(l - 1, pd)

    expand(d - 1, 0.0)
    return best[0], best[1]


def search_complex(r, y, alphabets, stats: SearchStats):
    """Complex counterpart of :func:`search_real`.

    ``alphabets[l]`` is a pair ``(re_levels, im_levels)`` of ascending
    tuples; the layer alphabet is their Cartesian product.  The diagonal of
    ``r`` must be real and positive.
    """
    d = len(y)
    inv = [1.0 / r[l][l].real for l in range(d)]
    r2 = [r[l][l].real ** 2 for l in range(d)]
    x = [0j] * d
    best = [inf, None]

    def expand(l, partial):
        s = y[l]
        row = r[l]
        for k in range(l + 1, d):
            s -= row[k] * x[k]
        stats.mults += 4 * (d - 1 - l) + 2
        c = s * inv[l]
        cr, ci = c.real, c.imag
        re_lv, im_lv = alphabets[l]
        stats.nodes += 1
        if l == 0:
            a = nearest(re_lv, cr)
            b = nearest(im_lv, ci)
            total = partial + r2[0] * ((cr - a) ** 2 + (ci - b) ** 2)
            stats.mults += 3
            stats.leaves += 1
            if total < best[0]:
                x[0] = complex(a, b)
                best[0] = total
                best[1] = list(x)
            return
        da = [(cr - a) ** 2 for a in re_lv]
        db = [(ci - b) ** 2 for b in im_lv]
        stats.mults += len(da) + len(db)
        order = sorted((ea + eb, a, b) for ea, a in zip(da, re_lv) for eb, b in zip(db, im_lv))
        rl = r2[l]
        for dist, a, b in order:
            pd = partial + rl * dist
            stats.mults += 1
            if pd >= best[0]:
                break
            x[l] = complex(a, b)
            expand(l - 1, pd)

    expand(d - 1, 0.0)
    return best[0], best[1]
