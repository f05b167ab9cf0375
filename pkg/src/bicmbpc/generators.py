"""Generator matrices of the perfect space-time codes.

Provenance: the 2x2 matrix is the Golden Code generator.  The 3x3 and
4x4 generators follow the cyclic division algebra construction of
perfect codes (Oggier, Rekaya, Belfiore, Viterbo, IEEE Trans. IT 52(9),
2006): rows are the Galois conjugates ``sigma^u`` of an ideal basis
``alpha * nu_j`` in ``Q(zeta_b, theta)`` with ``theta = 2 cos(2 pi / N)``,
``sigma: theta -> 2 cos(2 pi s / N)``.  The basis change ``nu = B^T
(1, theta, ..., theta^(D-1))`` makes the twisted trace form
``Tr(alpha conj(alpha) nu_i nu_j)`` equal to ``scale * delta_ij``; that
is what makes ``G`` unitary.  ``(alpha, B, scale)`` below were recovered
by a search over small integer ideal generators and checked to reproduce
the unitarity of the published matrices; for 4x4 the ideal generator
equals the published ``(1 - 3i) + i theta^2`` up to the unit ``i``.

The 6x6 entry is a substitute, not the published perfect code: the
rotated ``Z^6`` lattice of ``Q(zeta_13)^+`` with twist ``2 - theta``
(real, unitary, every entry non-zero).  No ideal of ``Q(omega,
zeta_28 + zeta_28^-1)`` with a small generator reproduced a unitary
matrix, so the 6x6 code keeps the encoding/grouping structure but not
the perfect-code coding gain.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

SUPPORTED_DIMS = (2, 3, 4, 6)

_OMEGA = cmath.exp(2j * math.pi / 3)

# dim: (N, s, alpha as coefficients of 1, theta, theta^2, ..., B rows, scale)
_RECIPES = {
    3: (
        7,
        2,
        (-2 - _OMEGA, 0, 1),
        ((-1, -1, -1), (-1, 0, 1), (0, 0, 1)),
        7,
    ),
    4: (
        15,
        2,
        (-3 - 1j, 0, 1, 0),
        ((-1, -1, 0, 0), (-3, 0, -3, -1), (1, 0, 0, 0), (1, 0, 1, 0)),
        15,
    ),
}

# dim: (N, s, real twist as coefficients of 1, theta, ..., B rows, scale)
_REAL_RECIPES = {
    6: (
        13,
        2,
        (2, -1, 0, 0, 0, 0),
        (
            (-1, -1, -1, -1, -1, -1),
            (-3, -2, -1, 0, 1, 2),
            (3, 1, 0, 0, 1, 3),
            (4, 1, 0, 0, 0, -1),
            (-1, 0, 0, 0, 0, -1),
            (-1, 0, 0, 0, 0, 0),
        ),
        13,
    ),
}


def golden_code_generator() -> np.ndarray:
    theta = (1 + math.sqrt(5)) / 2
    theta_bar = 1 - theta
    alpha = 1 + 1j * (1 - theta)
    alpha_bar = 1 + 1j * (1 - theta_bar)
    return np.array(
        [[alpha, alpha * theta], [alpha_bar, alpha_bar * theta_bar]], dtype=np.complex128
    ) / math.sqrt(5)


def _conjugate_powers(n: int, s: int, dim: int) -> np.ndarray:
    """``V[u, j] = sigma^u(theta)^j`` for ``theta = 2 cos(2 pi / n)``."""
    th = np.array([2 * math.cos(2 * math.pi * pow(s, u, n) / n) for u in range(dim)])
    return np.vander(th, dim, increasing=True)


def _from_recipe(dim: int) -> np.ndarray:
    if dim in _REAL_RECIPES:
        n, s, beta, b, c = _REAL_RECIPES[dim]
        vander = _conjugate_powers(n, s, dim)
        a = np.sqrt(vander @ np.asarray(beta, dtype=float)).astype(np.complex128)
    else:
        n, s, alpha, b, c = _RECIPES[dim]
        vander = _conjugate_powers(n, s, dim)
        a = vander @ np.asarray(alpha, dtype=np.complex128)
    return (a[:, None] * vander) @ np.asarray(b, dtype=float) / math.sqrt(c)


def generator_matrix(dim: int) -> np.ndarray:
    if dim == 2:
        return golden_code_generator()
    return _from_recipe(dim)
