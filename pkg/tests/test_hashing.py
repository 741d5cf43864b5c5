import itertools

import numpy as np
import pytest

from otpolar.protocol_sim.hashing import UniversalHash, gf2_matvec, pack_bits, toeplitz_hash, toeplitz_matrix


def test_toeplitz_structure(rng):
    seed = rng.integers(0, 2, 5 + 3 - 1)
    t = toeplitz_matrix(seed, 5, 3)
    for i in range(1, 3):
        for j in range(1, 5):
            assert t[i, j] == t[i - 1, j - 1]


def test_toeplitz_hash_is_linear(rng):
    seed = rng.integers(0, 2, 12 + 4 - 1)
    x, y = rng.integers(0, 2, 12), rng.integers(0, 2, 12)
    hx, hy, hxy = toeplitz_hash(seed, x, 4), toeplitz_hash(seed, y, 4), toeplitz_hash(seed, x ^ y, 4)
    assert np.array_equal(hx ^ hy, hxy)


def test_universal_hash_full_rank(rng):
    for _ in range(20):
        h = UniversalHash.draw(rng, 10, 6)
        assert np.linalg.matrix_rank(h.matrix.astype(float)) == 6


def test_identity_when_square(rng):
    h = UniversalHash.draw(rng, 8, 8)
    assert np.array_equal(h.matrix, np.eye(8, dtype=h.matrix.dtype))


def test_collision_probability_is_universal():
    # exact collision rate over all seeds for a fixed pair of inputs
    in_len, out_len = 5, 2
    x = np.array([1, 0, 1, 1, 0])
    y = np.array([0, 1, 1, 0, 1])
    n = UniversalHash.seed_len(in_len, out_len)
    hits = 0
    for bits in itertools.product((0, 1), repeat=n):
        h = UniversalHash(in_len, out_len, np.array(bits))
        hits += np.array_equal(h(x), h(y))
    assert hits / 2**n <= 2.0**-out_len + 1e-12


def test_pack_bits_and_matvec():
    assert pack_bits([1, 0, 1]) == 5
    m = np.array([[1, 1, 0], [0, 1, 1]])
    assert list(gf2_matvec(m, np.array([1, 1, 1]))) == [0, 0]


def test_zero_output_length(rng):
    h = UniversalHash.draw(rng, 6, 0)
    assert h(np.ones(6, dtype=int)).size == 0
