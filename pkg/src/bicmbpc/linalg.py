"""Small dense complex linear algebra.

Matrices are plain ``numpy`` arrays of ``complex128``.  The two
factorizations carry fixed phase conventions so that repeated calls are
bit-identical and the triangular factor of a real-structured matrix comes
out real.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegenerateFactorizationError, InvalidInputError

__all__ = [
    "SvdResult",
    "QrResult",
    "as_complex_matrix",
    "svd",
    "qr",
    "matmul",
    "hermitian",
    "frobenius_norm",
    "scale",
]

RANK_TOL = 1e-12


class SvdResult(NamedTuple):
    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray


class QrResult(NamedTuple):
    q: np.ndarray
    r: np.ndarray


def as_complex_matrix(a, *, square: bool = False) -> np.ndarray:
    """Validate ``a`` as a finite 2-D complex matrix and return a copy."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    return m


def svd(a) -> SvdResult:
    """Singular value decomposition ``a = U diag(s) V^H``.

    Singular values are non-increasing.  Each column of ``V`` is rotated
    so that its first entry of non-negligible magnitude is real and
    non-negative; the same phase is applied to the matching column of
    ``U`` so the product is unchanged.
    """
    m = as_complex_matrix(a, square=True)
    u, s, vh = np.linalg.svd(m)
    v = vh.conj().T
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = int(np.argmax(np.abs(col) > 1e-12 * max(1.0, np.abs(col).max())))
        ph = col[idx] / abs(col[idx])
        v[:, k] = col * np.conj(ph)
        u[:, k] = u[:, k] * np.conj(ph)
    return SvdResult(u, s, v)


def qr(a) -> QrResult:
    """QR factorization with a real, non-negative diagonal of ``R``.

    Raises
    ------
    DegenerateFactorizationError
        If the smallest singular value of ``a`` is below 1e-12.
    """
    m = as_complex_matrix(a, square=True)
    if np.linalg.svd(m, compute_uv=False)[-1] <= RANK_TOL:
        raise DegenerateFactorizationError("matrix is rank deficient")
    q, r = np.linalg.qr(m)
    d = np.diag(r)
    ph = d / np.abs(d)
    # R <- diag(conj(ph)) R, Q <- Q diag(ph)
    r = np.conj(ph)[:, None] * r
    q = q * ph[None, :]
    r[np.tril_indices_from(r, -1)] = 0.0
    r[np.diag_indices_from(r)] = np.abs(np.diag(r))
    return QrResult(q, r)


def matmul(a, b) -> np.ndarray:
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise InvalidInputError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def hermitian(a) -> np.ndarray:
    return as_complex_matrix(a).conj().T


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(as_complex_matrix(a)))


def scale(a, c: complex) -> np.ndarray:
    return as_complex_matrix(a) * c
