"""Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1 (0x11B).

Scalar operations work on plain ints in 0..255. ``scale`` and ``addmul``
operate on whole byte strings at once using ``bytes.translate`` with a
precomputed row of the multiplication table, which keeps row operations in
the decoder out of Python-level loops.
"""

from __future__ import annotations

import numpy as np

from .errors import ZeroInverse

POLY = 0x11B
GENERATOR = 0x03

_EXP = [0] * 510
_LOG = [0] * 256


def _build_tables() -> None:
    x = 1
    for i in range(255):
        _EXP[i] = x
        _LOG[x] = i
        # x * 3 == x * 2 + x
        x2 = x << 1
        if x2 & 0x100:
            x2 ^= POLY
        x = x2 ^ x
    for i in range(255, 510):
        _EXP[i] = _EXP[i - 255]


_build_tables()

# MUL_TABLE[c] is the 256-byte translation table for "multiply by c".
MUL_TABLE: tuple[bytes, ...] = tuple(
    bytes(0 if (a == 0 or c == 0) else _EXP[_LOG[a] + _LOG[c]] for a in range(256))
    for c in range(256)
)
INV_TABLE: tuple[int, ...] = (0,) + tuple(_EXP[255 - _LOG[a]] for a in range(1, 256))

# Array forms for vectorised row operations: MUL_ARRAY[c, x] == mul(c, x).
MUL_ARRAY = np.frombuffer(b"".join(MUL_TABLE), dtype=np.uint8).reshape(256, 256)
INV_ARRAY = np.array(INV_TABLE, dtype=np.uint8)


def add(a: int, b: int) -> int:
    return a ^ b


sub = add


def mul(a: int, b: int) -> int:
    return MUL_TABLE[a][b]


def inv(a: int) -> int:
    if a == 0:
        raise ZeroInverse("0 has no multiplicative inverse in GF(256)")
    return INV_TABLE[a]


def div(a: int, b: int) -> int:
    return MUL_TABLE[a][inv(b)]


def scale(data: bytes, c: int) -> bytes:
    """Multiply every byte of ``data`` by the field element ``c``."""
    if c == 1:
        return bytes(data)
    return bytes(data).translate(MUL_TABLE[c])


def xor_bytes(a: bytes, b: bytes) -> bytes:
    """Byte-wise field addition of two equal-length strings."""
    n = len(a)
    if n != len(b):
        raise ValueError(f"length mismatch: {n} != {len(b)}")
    return (int.from_bytes(a, "little") ^ int.from_bytes(b, "little")).to_bytes(n, "little")


def addmul(acc: bytes, data: bytes, c: int) -> bytes:
    """Return ``acc + c * data`` element-wise."""
    if c == 0:
        return bytes(acc)
    return xor_bytes(acc, scale(data, c))


def linear_combination(blocks, coefficients, width: int) -> bytes:
    """sum(c * block) over blocks zero-extended to ``width`` bytes."""
    acc = 0
    for block, c in zip(blocks, coefficients):
        if c:
            # little-endian ints zero-extend on the right for free
            acc ^= int.from_bytes(block.translate(MUL_TABLE[c]), "little")
    return acc.to_bytes(width, "little")
