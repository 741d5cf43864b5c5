import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from otpolar.gf2core import (
    BitVec,
    CapacityError,
    coordinates,
    kronecker_generator,
    min_coset_rep,
    subgroup_chain,
    subgroup_members,
    syndrome,
)


def test_bitvec_roundtrip_and_msb_order():
    v = BitVec.from_tuple((1, 0, 1, 1))
    assert v.bits == 0b1011
    assert v.to_tuple() == (1, 0, 1, 1)
    assert v.weight == 3
    assert str(v) == "(1,0,1,1)"


def test_bitvec_length_mismatch():
    with pytest.raises(ValueError):
        BitVec(0b1, 2) ^ BitVec(0b1, 3)


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_dot_is_bilinear(a, b, c):
    x, y, z = BitVec(a, 8), BitVec(b, 8), BitVec(c, 8)
    assert (x ^ y).dot(z) == x.dot(z) ^ y.dot(z)


def test_g4_columns():
    g = kronecker_generator(2)
    cols = [g.column(t).to_tuple() for t in range(1, 5)]
    assert cols == [(1, 1, 1, 1), (0, 1, 0, 1), (0, 0, 1, 1), (0, 0, 0, 1)]


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_generator_is_involution(s):
    g = kronecker_generator(s).rows.astype(int)
    assert np.array_equal((g @ g) % 2, np.eye(1 << s, dtype=int))


def test_capacity_cap():
    with pytest.raises(CapacityError):
        kronecker_generator(5)
    with pytest.raises(ValueError):
        kronecker_generator(-1)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_chain_is_nested_subgroups(s):
    chain = subgroup_chain(s)
    n = 1 << s
    prev = set(range(1 << n))
    for t in range(1, n):
        cur = set(int(w) for w in chain.member_words(t))
        assert len(cur) == 1 << (n - t)
        assert cur <= prev
        assert all(a ^ b in cur for a in cur for b in cur)
        g = kronecker_generator(s)
        assert all(syndrome(BitVec(w, n), g.column(t)) == 0 for w in cur)
        prev = cur


def test_member_and_coset_partition():
    chain = subgroup_chain(2)
    for t in range(1, 4):
        members = set(chain.member_words(t).tolist())
        coset = set(chain.coset_words(t).tolist())
        parent = set(chain.member_words(t - 1).tolist()) if t > 1 else set(range(16))
        assert not members & coset
        assert members | coset == parent


def test_weight_enumerator_brute_force():
    chain = subgroup_chain(3)
    for t in range(1, 8):
        for coset in (False, True):
            words = chain.coset_words(t) if coset else chain.member_words(t)
            brute = np.bincount([bin(int(w)).count("1") for w in words], minlength=9)
            assert np.array_equal(chain.weight_enumerator(t, coset=coset), brute)


def test_min_coset_rep_n4():
    chain = subgroup_chain(2)
    assert min_coset_rep(chain, 2).to_tuple() == (0, 0, 1, 1)
    assert min_coset_rep(chain, 3).to_tuple() == (0, 1, 0, 1)


def test_subgroup_members_are_bitvecs():
    ms = subgroup_members(subgroup_chain(2), 2)
    assert {m.to_tuple() for m in ms} == {(0, 0, 0, 0), (1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, 1)}


def test_coordinates_bijective_on_subgroup():
    chain = subgroup_chain(3)
    for t in range(1, 8):
        words = chain.member_words(t)
        c = coordinates(words, chain, t)
        assert c.shape == (len(words), 8 - t)
        assert len({tuple(r) for r in c}) == len(words)
        # linear: coordinates of a xor b equal the xor of coordinates
        for a, b in itertools.islice(itertools.combinations(range(len(words)), 2), 50):
            ab = coordinates([int(words[a]) ^ int(words[b])], chain, t)[0]
            assert np.array_equal(ab, c[a] ^ c[b])
