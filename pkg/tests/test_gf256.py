import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncrest import gf256
from ncrest.errors import ZeroInverse
from oracles import gf_inv, gf_mul

elem = st.integers(0, 255)
nonzero = st.integers(1, 255)

# Frozen from the long-multiplication oracle.
MUL_57_83 = 0xC1
INV_02 = 0x8D


def test_add_examples():
    assert gf256.add(0x00, 0x5A) == 0x5A
    assert gf256.add(0x5A, 0x5A) == 0x00
    assert gf256.add(0x57, 0x83) == 0xD4


def test_mul_frozen_values():
    assert gf256.mul(0x57, 0x83) == MUL_57_83 == gf_mul(0x57, 0x83)
    assert gf256.inv(0x02) == INV_02
    assert gf256.mul(0x02, INV_02) == 1
    assert gf256.inv(0x01) == 0x01


def test_full_table_matches_oracle():
    for a in range(256):
        row = gf256.MUL_TABLE[a]
        for b in range(256):
            expected = gf_mul(a, b)
            assert gf256.mul(a, b) == expected
            assert row[b] == expected
            assert gf256.MUL_ARRAY[a, b] == expected


def test_identity_and_zero():
    for x in range(256):
        assert gf256.mul(1, x) == x
        assert gf256.mul(0, x) == 0


def test_every_inverse():
    for a in range(1, 256):
        v = gf256.inv(a)
        assert v == gf_inv(a)
        assert gf256.mul(a, v) == 1
        assert gf256.inv(v) == a
        assert gf256.INV_ARRAY[a] == v


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroInverse):
        gf256.inv(0)
    with pytest.raises(ZeroDivisionError):
        gf256.div(5, 0)


@given(elem, elem, elem)
def test_distributive(a, b, c):
    assert gf256.mul(a, gf256.add(b, c)) == gf256.add(gf256.mul(a, b), gf256.mul(a, c))


@given(elem, elem)
def test_add_self_inverse(x, y):
    assert gf256.add(gf256.add(x, y), y) == x
    assert gf256.sub(x, y) == gf256.add(x, y)


@given(elem, nonzero)
def test_div_undoes_mul(a, b):
    assert gf256.div(gf256.mul(a, b), b) == a


@given(st.binary(max_size=64), elem)
def test_scale_bytewise(data, c):
    assert gf256.scale(data, c) == bytes(gf_mul(c, x) for x in data)


@given(st.binary(max_size=40), st.data())
def test_xor_bytes(a, data):
    b = data.draw(st.binary(min_size=len(a), max_size=len(a)))
    assert gf256.xor_bytes(a, b) == bytes(x ^ y for x, y in zip(a, b))
    assert gf256.addmul(a, b, 3) == bytes(x ^ gf_mul(3, y) for x, y in zip(a, b))


def test_xor_bytes_length_mismatch():
    with pytest.raises(ValueError):
        gf256.xor_bytes(b"ab", b"abc")


@given(st.lists(st.tuples(st.binary(min_size=1, max_size=30), elem), min_size=1, max_size=6))
def test_linear_combination(parts):
    blocks = [b for b, _ in parts]
    coefs = [c for _, c in parts]
    width = max(map(len, blocks))
    expected = [0] * width
    for data, c in parts:
        for i, x in enumerate(data):
            expected[i] ^= gf_mul(c, x)
    assert gf256.linear_combination(blocks, coefs, width) == bytes(expected)


def test_distributivity_bulk():
    """10^6 random triples, vectorised, against the oracle table."""
    oracle = np.array([[gf_mul(a, b) for b in range(256)] for a in range(256)], dtype=np.uint8)
    rng = np.random.default_rng(1234)
    a, b, c = rng.integers(0, 256, size=(3, 1_000_000), dtype=np.uint8)
    lhs = gf256.MUL_ARRAY[a, b ^ c]
    rhs = gf256.MUL_ARRAY[a, b] ^ gf256.MUL_ARRAY[a, c]
    assert np.array_equal(lhs, rhs)
    assert np.array_equal(gf256.MUL_ARRAY, oracle)


def test_associative_sample():
    rng = random.Random(7)
    for _ in range(20_000):
        a, b, c = (rng.randrange(256) for _ in range(3))
        assert gf256.mul(gf256.mul(a, b), c) == gf256.mul(a, gf256.mul(b, c))
