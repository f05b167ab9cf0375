"""Pairwise-error weights of the perfect code across subchannels.

For a pair of symbol blocks ``X != X_hat`` the weight on subchannel ``u``
is ``rho_u = sum_v |g_u^T (x_v - x_hat_v)|^2``.  Full diversity needs the
strongest subchannel to see the error, i.e. ``rho_1 > 0`` for every pair;
that holds when no entry of the first row of ``G`` vanishes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bicm import Constellation
from .errors import InternalConsistencyError, InvalidInputError
from .pstbc import PstbcParams

__all__ = ["RHO_TOL", "DiversityProbe", "diversity_probe", "single_symbol_pairs", "probe_summary"]

RHO_TOL = 1e-9


@dataclass(frozen=True)
class DiversityProbe:
    x: np.ndarray = field(repr=False)
    x_hat: np.ndarray = field(repr=False)
    rho: np.ndarray


def diversity_probe(params: PstbcParams, x, x_hat) -> DiversityProbe:
    x = np.asarray(x, dtype=np.complex128)
    x_hat = np.asarray(x_hat, dtype=np.complex128)
    d = params.dim
    if x.shape != (d, d) or x_hat.shape != (d, d):
        raise InvalidInputError(f"blocks must be {d}x{d}")
    if np.array_equal(x, x_hat):
        raise InvalidInputError("x and x_hat must differ")
    rho = np.sum(np.abs(params.generator @ (x - x_hat)) ** 2, axis=1)
    if not rho[0] > RHO_TOL:
        raise InternalConsistencyError(f"rho_1 = {rho[0]:.3e} vanishes for a non-zero error")
    return DiversityProbe(x, x_hat, rho)


def single_symbol_pairs(dim: int, constellation: Constellation, base=None):
    """Yield ``(X, X_hat)`` differing in exactly one entry.

    With ``base=None`` every block over the constellation is used as ``X``
    (only practical for small ``D`` and ``M``).  Otherwise ``X`` is ``base``
    with each entry swept over all symbols; since ``rho`` depends on the
    difference only, this covers every distinct single-symbol error.
    """
    pts = constellation.points
    if base is None:
        bases = (np.array(c).reshape(dim, dim) for c in itertools.product(pts, repeat=dim * dim))
    else:
        bases = (np.asarray(base, dtype=np.complex128),)
    for x0 in bases:
        for n, m in itertools.product(range(dim), repeat=2):
            for s, s_hat in itertools.product(pts, repeat=2):
                if s == s_hat or (base is None and s != x0[n, m]):
                    continue
                x = x0.copy()
                x[n, m] = s
                x_hat = x.copy()
                x_hat[n, m] = s_hat
                yield x, x_hat


def probe_summary(params: PstbcParams, constellation: Constellation, exhaustive: bool = False) -> dict:
    base = None if exhaustive else constellation.points[np.zeros((params.dim, params.dim), int)]
    rho1 = []
    rho_min = np.inf
    for x, x_hat in single_symbol_pairs(params.dim, constellation, base):
        p = diversity_probe(params, x, x_hat)
        rho1.append(p.rho[0])
        rho_min = min(rho_min, p.rho.min())
    return {
        "dim": params.dim,
        "m": constellation.m,
        "pairs": len(rho1),
        "min_rho1": float(min(rho1)),
        "max_rho1": float(max(rho1)),
        "min_rho_any": float(rho_min),
        "min_abs_g1": float(np.abs(params.generator[0]).min()),
    }
