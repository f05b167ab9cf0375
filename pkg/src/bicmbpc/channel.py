"""Quasi-static Rayleigh MIMO channel reduced by SVD beamforming.

With transmit beamformer ``V`` and receive combiner ``U^H`` the link is
the diagonal model ``Y = Lambda Z + N``; the unitary filters are never
applied explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .linalg import SvdResult, svd

__all__ = [
    "ChannelRealization",
    "NoiseConfig",
    "sample_channel",
    "complex_gaussian",
    "transmit",
    "db_to_linear",
]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class NoiseConfig:
    """Noise level for a given linear SNR; ``n0 = D / snr`` per complex entry."""

    snr: float
    dim: int
    enabled: bool = True

    def __post_init__(self):
        if not self.snr > 0:
            raise InvalidInputError("snr must be positive")

    @classmethod
    def from_db(cls, snr_db: float, dim: int, enabled: bool = True) -> "NoiseConfig":
        return cls(db_to_linear(snr_db), dim, enabled)

    @property
    def n0(self) -> float:
        return self.dim / self.snr if self.enabled else 0.0


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray = field(repr=False)
    svd: SvdResult = field(repr=False)

    @property
    def singular_values(self) -> np.ndarray:
        return self.svd.singular_values

    @property
    def lam(self) -> np.ndarray:
        return np.diag(self.svd.singular_values).astype(np.complex128)


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """i.i.d. CN(0, variance) samples."""
    s = np.sqrt(variance / 2)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(dim: int, rng: np.random.Generator) -> ChannelRealization:
    if dim not in (2, 3, 4, 6):
        raise InvalidInputError(f"unsupported dimension {dim}")
    h = complex_gaussian(rng, (dim, dim))
    return ChannelRealization(h, svd(h))


def transmit(lam, z, noise: NoiseConfig, rng: np.random.Generator) -> np.ndarray:
    """``Y = Lambda Z + N`` for one codeword or a stack ``(..., D, D)``.

    ``lam`` is either the diagonal matrix or the vector of singular values.
    """
    lam = np.asarray(lam)
    gains = np.diag(lam).real if lam.ndim == 2 else lam.real
    z = np.asarray(z, dtype=np.complex128)
    if z.shape[-2] != gains.shape[-1]:
        raise InvalidInputError(f"Lambda of size {gains.shape[-1]} vs codeword {z.shape}")
    y = gains[:, None] * z
    if noise.enabled:
        y = y + complex_gaussian(rng, z.shape, noise.n0)
    return y
