"""Coding header, coded messages, and their binary wire layouts.

Coded message (big-endian)::

    "NCR1" | id_oldest u64 | id_newest u64 | w u16 | w x length u32
           | w x coefficient u8 | payload (max(length) bytes)

Response::

    "NCA1" | seen_newest u64 | unseen_newest u64
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from . import gf256
from .errors import (
    CoefficientCountMismatch,
    EmptyWindow,
    LengthExceedsPayload,
    MalformedHeader,
    NonContiguousIds,
    ZeroNewestCoefficient,
)

MESSAGE_MAGIC = b"NCR1"
RESPONSE_MAGIC = b"NCA1"
MAX_ID = 2**64 - 1
MAX_LENGTH = 2**32 - 1
MAX_WINDOW = 2**16 - 1

_FIXED = struct.Struct(">4sQQH")
_RESPONSE = struct.Struct(">4sQQ")


@dataclass(frozen=True, slots=True)
class NativeMessage:
    id: int
    payload: bytes

    @property
    def length(self) -> int:
        return len(self.payload)


@dataclass(frozen=True, slots=True)
class CodingHeader:
    id_oldest: int
    id_newest: int
    lengths: tuple[int, ...]
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if type(self.lengths) is not tuple:
            object.__setattr__(self, "lengths", tuple(self.lengths))
        if type(self.coefficients) is not tuple:
            object.__setattr__(self, "coefficients", tuple(self.coefficients))
        self.validate()

    @property
    def window(self) -> int:
        return self.id_newest - self.id_oldest + 1

    @property
    def ids(self) -> range:
        return range(self.id_oldest, self.id_newest + 1)

    def validate(self) -> None:
        if not 1 <= self.id_oldest <= self.id_newest <= MAX_ID:
            raise MalformedHeader(
                f"bad ID window [{self.id_oldest}..{self.id_newest}]"
            )
        w = self.window
        if w > MAX_WINDOW:
            raise MalformedHeader(f"window of {w} messages exceeds {MAX_WINDOW}")
        if len(self.lengths) != w or len(self.coefficients) != w:
            raise MalformedHeader(
                f"window has {w} messages but {len(self.lengths)} lengths "
                f"and {len(self.coefficients)} coefficients"
            )
        if min(self.lengths) < 1 or max(self.lengths) > MAX_LENGTH:
            raise MalformedHeader(f"message lengths out of range: {self.lengths}")
        if min(self.coefficients) < 0 or max(self.coefficients) > 255:
            raise MalformedHeader(f"coefficients are not bytes: {self.coefficients}")
        if self.coefficients[-1] == 0:
            raise MalformedHeader("newest message has a zero coefficient")

    def coefficient_of(self, msg_id: int) -> int:
        if not self.id_oldest <= msg_id <= self.id_newest:
            return 0
        return self.coefficients[msg_id - self.id_oldest]

    def length_of(self, msg_id: int) -> int:
        return self.lengths[msg_id - self.id_oldest]


@dataclass(frozen=True, slots=True)
class CodedMessage:
    header: CodingHeader
    payload: bytes

    def __post_init__(self):
        if len(self.payload) != max(self.header.lengths):
            raise MalformedHeader(
                f"payload is {len(self.payload)} bytes, "
                f"header implies {max(self.header.lengths)}"
            )


@dataclass(frozen=True, slots=True)
class NcResponse:
    """Server feedback: newest seen ID and newest unseen ID."""

    seen_newest: int
    unseen_newest: int

    def __str__(self) -> str:
        return f"Response({self.seen_newest},{self.unseen_newest})"


def pad(payload: bytes, length: int) -> bytes:
    return payload + bytes(length - len(payload))


def prune(payload: bytes, true_length: int) -> bytes:
    """Drop the zero padding added by :func:`combine`."""
    if true_length > len(payload):
        raise LengthExceedsPayload(
            f"true length {true_length} exceeds payload of {len(payload)} bytes"
        )
    return bytes(payload[:true_length])


def combine(messages: Sequence[NativeMessage], coefficients: Sequence[int]) -> CodedMessage:
    """Form the linear combination sum(coefficients[i] * messages[i])."""
    if not messages:
        raise EmptyWindow("cannot combine an empty window")
    ids = [m.id for m in messages]
    if ids != list(range(ids[0], ids[0] + len(ids))):
        raise NonContiguousIds(f"message IDs {ids} are not contiguous and ascending")
    if len(coefficients) != len(messages):
        raise CoefficientCountMismatch(
            f"{len(messages)} messages but {len(coefficients)} coefficients"
        )
    if coefficients[-1] == 0:
        raise ZeroNewestCoefficient("the newest message must participate")

    payloads = [m.payload for m in messages]
    lengths = tuple(map(len, payloads))
    acc = gf256.linear_combination(payloads, coefficients, max(lengths))
    header = CodingHeader(
        id_oldest=messages[0].id,
        id_newest=messages[-1].id,
        lengths=lengths,
        coefficients=tuple(coefficients),
    )
    return CodedMessage(header, acc)


def header_size(window: int) -> int:
    return _FIXED.size + 5 * window


def serialize(msg: CodedMessage) -> bytes:
    h = msg.header
    h.validate()
    parts = [
        _FIXED.pack(MESSAGE_MAGIC, h.id_oldest, h.id_newest, h.window),
        struct.pack(f">{h.window}I", *h.lengths),
        bytes(h.coefficients),
        msg.payload,
    ]
    return b"".join(parts)


def deserialize(data: bytes) -> CodedMessage:
    data = bytes(data)
    if len(data) < _FIXED.size:
        raise MalformedHeader(f"truncated header: {len(data)} bytes")
    magic, oldest, newest, w = _FIXED.unpack_from(data)
    if magic != MESSAGE_MAGIC:
        raise MalformedHeader(f"bad magic {magic!r}")
    if newest < oldest or w != newest - oldest + 1:
        raise MalformedHeader(f"window count {w} does not match [{oldest}..{newest}]")
    off = _FIXED.size
    if len(data) < off + 5 * w:
        raise MalformedHeader("truncated length/coefficient lists")
    lengths = struct.unpack_from(f">{w}I", data, off)
    off += 4 * w
    coefficients = tuple(data[off:off + w])
    off += w
    header = CodingHeader(oldest, newest, lengths, coefficients)
    payload = data[off:]
    if len(payload) != max(lengths):
        raise MalformedHeader(
            f"payload is {len(payload)} bytes, header implies {max(lengths)}"
        )
    return CodedMessage(header, payload)


def serialize_response(resp: NcResponse) -> bytes:
    return _RESPONSE.pack(RESPONSE_MAGIC, resp.seen_newest, resp.unseen_newest)


def deserialize_response(data: bytes) -> NcResponse:
    if len(data) != _RESPONSE.size:
        raise MalformedHeader(f"response must be {_RESPONSE.size} bytes, got {len(data)}")
    magic, seen, unseen = _RESPONSE.unpack(data)
    if magic != RESPONSE_MAGIC:
        raise MalformedHeader(f"bad magic {magic!r}")
    return NcResponse(seen, unseen)
