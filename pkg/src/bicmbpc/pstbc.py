"""Perfect space-time block codewords and their group structure.

A ``D x D`` codeword is built from ``D`` symbol columns ``x_1 .. x_D`` as

    Z = sum_v diag(G x_v) E^(v-1)

where ``G`` is the unitary generator of the perfect code and ``E`` is the
cyclic shift with the non-norm element ``g`` in its bottom-left corner.
Every entry of ``Lambda Z`` depends on a single column ``x_v``; the
entries belonging to column ``v`` sit at :func:`group_positions` and
equal ``Phi_v Lambda G x_v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .generators import SUPPORTED_DIMS, generator_matrix

__all__ = [
    "PstbcParams",
    "make_params",
    "shift_matrix",
    "encode",
    "encode_batch",
    "group_positions",
    "phase_matrix",
    "extract_groups",
]


def _non_norm_element(dim: int) -> complex:
    if dim in (2, 4):
        return 1j
    w = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    return w if dim == 3 else -w


@dataclass(frozen=True)
class PstbcParams:
    dim: int
    g: complex
    generator: np.ndarray = field(repr=False)
    shift: np.ndarray = field(repr=False)


def shift_matrix(dim: int, g: complex) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=np.complex128)
    e[np.arange(dim - 1), np.arange(1, dim)] = 1.0
    e[dim - 1, 0] = g
    return e


def make_params(dim: int) -> PstbcParams:
    if dim not in SUPPORTED_DIMS:
        raise InvalidInputError(f"unsupported dimension {dim}; expected one of {SUPPORTED_DIMS}")
    g = _non_norm_element(dim)
    gen = generator_matrix(dim)
    gen.setflags(write=False)
    e = shift_matrix(dim, g)
    e.setflags(write=False)
    return PstbcParams(dim=dim, g=g, generator=gen, shift=e)


def _check_block(params: PstbcParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    d = params.dim
    if x.shape[-2:] != (d, d):
        raise InvalidInputError(f"symbol block must be {d}x{d}, got {x.shape}")
    return x


def encode(params: PstbcParams, x) -> np.ndarray:
    """Codeword for one symbol block ``x`` whose columns are ``x_1 .. x_D``."""
    return encode_batch(params, _check_block(params, x)[None])[0]


def encode_batch(params: PstbcParams, x) -> np.ndarray:
    """Vectorized :func:`encode` over blocks of shape ``(..., D, D)``.

    Uses the group structure directly: column ``v`` of ``G X`` lands at the
    positions of group ``v``, multiplied by ``Phi_v``.
    """
    x = _check_block(params, x)
    d = params.dim
    gx = params.generator @ x  # (..., D, D); column v is G x_v
    z = np.empty_like(gx)
    rows = np.arange(d)
    for v in range(1, d + 1):
        cols = (rows + v - 1) % d
        phi = np.diag(phase_matrix(params, v))
        z[..., rows, cols] = gx[..., :, v - 1] * phi
    return z


def group_positions(dim: int, v: int) -> list[tuple[int, int]]:
    """1-based matrix positions ``(u, col)`` holding group ``v``, by row."""
    if dim < 1:
        raise InvalidInputError(f"bad dimension {dim}")
    if not 1 <= v <= dim:
        raise InvalidInputError(f"group index {v} outside 1..{dim}")
    return [(u, (u + v - 2) % dim + 1) for u in range(1, dim + 1)]


def phase_matrix(params: PstbcParams, v: int) -> np.ndarray:
    d = params.dim
    if not 1 <= v <= d:
        raise InvalidInputError(f"group index {v} outside 1..{d}")
    u = np.arange(1, d + 1)
    return np.diag(np.where(u <= d + 1 - v, 1.0 + 0j, params.g))


def extract_groups(y) -> np.ndarray:
    """Stack the groups of ``y`` (shape ``(..., D, D)``) as ``(..., D, D)``.

    Column ``v - 1`` of the result is the vector at ``group_positions(D, v)``.
    """
    y = np.asarray(y)
    d = y.shape[-1]
    rows = np.arange(d)
    out = np.empty(y.shape, dtype=np.complex128)
    for v in range(1, d + 1):
        out[..., :, v - 1] = y[..., rows, (rows + v - 1) % d]
    return out
