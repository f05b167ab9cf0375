import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bicmbpc.errors import InvalidInputError
from bicmbpc.generators import SUPPORTED_DIMS, generator_matrix, golden_code_generator
from bicmbpc.pstbc import (
    encode,
    encode_batch,
    extract_groups,
    group_positions,
    make_params,
    phase_matrix,
    shift_matrix,
)

DIMS = list(SUPPORTED_DIMS)


def direct_codeword(params, x):
    """Sum over v of diag(G x_v) E^(v-1), straight from matrix powers."""
    d = params.dim
    z = np.zeros((d, d), complex)
    for v in range(d):
        z += np.diag(params.generator @ x[:, v]) @ np.linalg.matrix_power(params.shift, v)
    return z


def _block(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


@pytest.mark.parametrize("d", DIMS)
def test_generator_unitary_with_nonzero_first_row(d):
    g = generator_matrix(d)
    assert np.allclose(g.conj().T @ g, np.eye(d), atol=1e-12)
    assert np.abs(g[0]).min() > 1e-3


def test_golden_generator_closed_form():
    th = (1 + math.sqrt(5)) / 2
    thb = (1 - math.sqrt(5)) / 2
    a = 1 + 1j - 1j * th
    ab = 1 + 1j - 1j * thb
    want = np.array([[a, a * th], [ab, ab * thb]]) / math.sqrt(5)
    assert np.allclose(golden_code_generator(), want, atol=1e-15)
    assert np.allclose(generator_matrix(2), want, atol=1e-15)


@pytest.mark.parametrize("d,g", [(2, 1j), (3, np.exp(2j * np.pi / 3)),
                                 (4, 1j), (6, -np.exp(2j * np.pi / 3))])
def test_shift_power_is_scaled_identity(d, g):
    p = make_params(d)
    assert np.isclose(p.g, g)
    assert np.allclose(np.linalg.matrix_power(shift_matrix(d, p.g), d), g * np.eye(d), atol=1e-13)


@pytest.mark.parametrize("d", DIMS)
def test_encode_matches_direct_sum(d, rng):
    p = make_params(d)
    for _ in range(20):
        x = _block(rng, d)
        assert np.allclose(encode(p, x), direct_codeword(p, x), atol=1e-12)


@pytest.mark.parametrize("d", DIMS)
def test_grouping_identity_and_energy(d, rng):
    p = make_params(d)
    for _ in range(50):
        lam = np.sort(rng.rayleigh(size=d))[::-1]
        x = _block(rng, d)
        lz = lam[:, None] * encode(p, x)
        for v in range(1, d + 1):
            got = np.array([lz[u - 1, c - 1] for u, c in group_positions(d, v)])
            assert np.allclose(got, phase_matrix(p, v) @ (lam * (p.generator @ x[:, v - 1])),
                               atol=1e-12)
        per_group = sum(np.linalg.norm(lam * (p.generator @ x[:, v])) ** 2 for v in range(d))
        assert np.isclose(np.linalg.norm(lz) ** 2, per_group, rtol=1e-12)


@pytest.mark.parametrize("d", DIMS)
def test_groups_partition_the_matrix(d):
    cells = [pos for v in range(1, d + 1) for pos in group_positions(d, v)]
    assert sorted(cells) == [(u, c) for u in range(1, d + 1) for c in range(1, d + 1)]


def test_group_position_and_phase_examples():
    assert group_positions(2, 1) == [(1, 1), (2, 2)]
    assert group_positions(2, 2) == [(1, 2), (2, 1)]
    assert group_positions(3, 3) == [(1, 3), (2, 1), (3, 2)]
    p = make_params(2)
    assert np.allclose(phase_matrix(p, 1), np.eye(2))
    assert np.allclose(phase_matrix(p, 2), np.diag([1, 1j]))
    p4 = make_params(4)
    assert np.allclose(np.diag(phase_matrix(p4, 3)), [1, 1, 1j, 1j])


@pytest.mark.parametrize("d", DIMS)
def test_extract_groups_matches_positions(d, rng):
    y = _block(rng, d)
    out = extract_groups(y)
    for v in range(1, d + 1):
        assert np.allclose(out[:, v - 1], [y[u - 1, c - 1] for u, c in group_positions(d, v)])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(DIMS), st.integers(0, 2**32 - 1))
def test_encoding_is_linear_and_injective(d, seed):
    rng = np.random.default_rng(seed)
    p = make_params(d)
    a, b = _block(rng, d), _block(rng, d)
    s = complex(*rng.standard_normal(2))
    assert np.allclose(encode(p, a + s * b), encode(p, a) + s * encode(p, b), atol=1e-10)
    # unitary G keeps the Frobenius norm, so distinct blocks give distinct codewords
    assert np.isclose(np.linalg.norm(encode(p, a - b)), np.linalg.norm(a - b), rtol=1e-10)


def test_batch_shape_and_agreement(rng):
    p = make_params(4)
    xs = rng.standard_normal((3, 5, 4, 4)) + 0j
    zs = encode_batch(p, xs)
    assert zs.shape == xs.shape
    for i, k in itertools.product(range(3), range(5)):
        assert np.allclose(zs[i, k], encode(p, xs[i, k]))


def test_bad_inputs():
    with pytest.raises(InvalidInputError):
        make_params(5)
    p = make_params(2)
    with pytest.raises(InvalidInputError):
        encode(p, np.zeros((3, 3)))
    with pytest.raises(InvalidInputError):
        phase_matrix(p, 3)
    with pytest.raises(InvalidInputError):
        group_positions(2, 0)
