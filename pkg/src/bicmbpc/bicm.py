"""Bit interleaving, Gray-mapped square QAM and PSTBC symbol blocks.

Bit layout of a symbol label (MSB first): the first ``log2(M)/2`` bits
select the real-axis PAM level, the rest the imaginary-axis level.  Each
axis carries a reflected Gray code, so the label of a QAM point is the
concatenation of two independent PAM labels.

``D*D`` consecutive symbols fill one block column by column: symbol
``s`` of a block goes to column (group) ``m = s // D``, entry ``n = s % D``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .convcode import ConvCodeSpec, conv_encode
from .errors import InvalidInputError

__all__ = [
    "Constellation",
    "make_constellation",
    "InterleaverPerm",
    "make_interleaver",
    "interleave",
    "deinterleave",
    "Location",
    "LocationMap",
    "map_symbols",
    "CodedFrame",
    "build_frame",
    "bits_per_block",
]


@dataclass(frozen=True)
class Constellation:
    """Square M-QAM as two Gray-labelled sqrt(M)-PAM axes, unit energy.

    ``points[label]`` is the symbol whose label, read MSB first, equals the
    integer ``label``.  ``pam_levels[i]`` is the normalized level whose
    axis label is ``i``.
    """

    m: int
    points: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    pam_levels: np.ndarray = field(repr=False)
    pam_labels: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self) -> int:
        return self.labels.shape[1]

    @property
    def bits_per_axis(self) -> int:
        return self.bits_per_symbol // 2

    @property
    def pam_size(self) -> int:
        return len(self.pam_levels)

    def axis_of(self, j: int) -> str:
        return "real" if j < self.bits_per_axis else "imag"

    def axis_subset(self, j: int, b: int) -> np.ndarray:
        """PAM levels of the axis addressed by bit ``j`` whose label bit is ``b``."""
        jj = j % self.bits_per_axis
        return self.pam_levels[self.pam_labels[:, jj] == b]

    def subset(self, j: int, b: int) -> np.ndarray:
        """Points whose label has value ``b`` at bit ``j``."""
        return self.points[self.labels[:, j] == b]


def _bits_msb(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def make_constellation(m: int) -> Constellation:
    side = int(round(np.sqrt(m)))
    if side * side != m or side < 2 or side & (side - 1):
        raise InvalidInputError(f"M={m} is not a square power-of-two QAM size")
    bpa = side.bit_length() - 1
    idx = np.arange(side)
    gray = idx ^ (idx >> 1)
    levels_by_idx = (side - 1 - 2 * idx).astype(float)
    norm = np.sqrt(2 * (m - 1) / 3)
    pam_levels = np.empty(side)
    pam_levels[gray] = levels_by_idx / norm
    pam_labels = _bits_msb(np.arange(side), bpa)
    labels = _bits_msb(np.arange(m), 2 * bpa)
    re_lab = np.arange(m) >> bpa
    im_lab = np.arange(m) & (side - 1)
    points = pam_levels[re_lab] + 1j * pam_levels[im_lab]
    for a in (points, labels, pam_levels, pam_labels):
        a.setflags(write=False)
    return Constellation(m=m, points=points, labels=labels, pam_levels=pam_levels,
                         pam_labels=pam_labels)


@dataclass(frozen=True)
class InterleaverPerm:
    """Output bit ``i`` of :func:`interleave` is input bit ``perm[i]``."""

    length: int
    perm: np.ndarray = field(repr=False)
    seed: int | None = None

    @classmethod
    def identity(cls, length: int) -> "InterleaverPerm":
        return cls(length, np.arange(length), None)


def make_interleaver(length: int, seed: int) -> InterleaverPerm:
    if length < 1:
        raise InvalidInputError("interleaver length must be positive")
    perm = np.random.default_rng(seed).permutation(length)
    perm.setflags(write=False)
    return InterleaverPerm(length, perm, seed)


def interleave(perm: InterleaverPerm, x, axis: int = -1) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[axis] != perm.length:
        raise InvalidInputError(f"expected {perm.length} entries along axis, got {x.shape[axis]}")
    return np.take(x, perm.perm, axis=axis)


def deinterleave(perm: InterleaverPerm, x, axis: int = -1) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[axis] != perm.length:
        raise InvalidInputError(f"expected {perm.length} entries along axis, got {x.shape[axis]}")
    inv = np.empty(perm.length, dtype=np.intp)
    inv[perm.perm] = np.arange(perm.length)
    return np.take(x, inv, axis=axis)


class Location(NamedTuple):
    block: int
    m: int
    n: int
    j: int
    axis: str


@dataclass(frozen=True)
class LocationMap:
    """Where each (interleaved) bit index lands; all indices 0-based."""

    block: np.ndarray
    m: np.ndarray
    n: np.ndarray
    j: np.ndarray
    bits_per_axis: int

    def __len__(self) -> int:
        return len(self.block)

    def __getitem__(self, k: int) -> Location:
        j = int(self.j[k])
        return Location(int(self.block[k]), int(self.m[k]), int(self.n[k]), j,
                        "real" if j < self.bits_per_axis else "imag")


def bits_per_block(constellation: Constellation, dim: int) -> int:
    return dim * dim * constellation.bits_per_symbol


def map_symbols(constellation: Constellation, bits, dim: int):
    """Map a bit stream to symbol blocks.

    Returns ``(blocks, location_map)`` where ``blocks`` has shape
    ``(..., K, D, D)`` and ``blocks[..., k, n, m]`` is entry ``n`` of column
    ``x_m`` of block ``k``.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    q = constellation.bits_per_symbol
    per_block = bits_per_block(constellation, dim)
    nbits = bits.shape[-1]
    if nbits % per_block:
        raise InvalidInputError(f"{nbits} bits do not fill whole blocks of {per_block}")
    nblk = nbits // per_block
    grouped = bits.reshape(bits.shape[:-1] + (nblk, dim, dim, q))  # (..., k, m, n, j)
    weights = 1 << np.arange(q - 1, -1, -1)
    labels = (grouped * weights).sum(axis=-1)
    syms = constellation.points[labels]  # (..., k, m, n)
    blocks = np.swapaxes(syms, -1, -2)  # (..., k, n, m)
    k, m, n, j = np.unravel_index(np.arange(nbits), (nblk, dim, dim, q))
    return blocks, LocationMap(k, m, n, j, constellation.bits_per_axis)


@dataclass(frozen=True)
class CodedFrame:
    info_bits: np.ndarray
    coded_bits: np.ndarray
    interleaved_bits: np.ndarray
    symbol_blocks: np.ndarray
    location_map: LocationMap
    n_pad: int


def build_frame(info_bits, code: ConvCodeSpec, interleaver: InterleaverPerm,
                constellation: Constellation, dim: int, filler=None) -> CodedFrame:
    """Encode, interleave and map one frame (or a batch, leading axes).

    The interleaved stream is padded up to a whole number of blocks with
    ``filler`` (zeros if omitted); the receiver discards those bits.
    """
    info = np.asarray(info_bits, dtype=np.uint8)
    coded = conv_encode(code, info)
    inter = interleave(interleaver, coded)
    per_block = bits_per_block(constellation, dim)
    n_pad = (-inter.shape[-1]) % per_block
    if n_pad:
        shape = inter.shape[:-1] + (n_pad,)
        fill = (np.zeros(shape, dtype=np.uint8) if filler is None
                else np.broadcast_to(np.asarray(filler, dtype=np.uint8), shape))
        inter = np.concatenate([inter, fill], axis=-1)
    blocks, locmap = map_symbols(constellation, inter, dim)
    return CodedFrame(info, coded, inter, blocks, locmap, n_pad)
