"""Client NC layer: coding buffer, random combinations, and loss compensation."""

from __future__ import annotations

import random
from collections import deque
from typing import Callable, Sequence

from .codec import (
    MAX_LENGTH,
    CodedMessage,
    NativeMessage,
    NcResponse,
    combine,
    deserialize_response,
    serialize,
)
from .errors import InvalidResponse, WindowFull

DEFAULT_SUBSET_LIMIT = 16

CoefficientSource = Callable[[int], Sequence[int]]


def random_coefficients(rng: random.Random, count: int) -> list[int]:
    """Older messages get 0..255, the newest 1..255 so it always participates."""
    coefs = list(rng.randbytes(count - 1))
    coefs.append(rng.randrange(1, 256))
    return coefs


class NcClient:
    """Encoder side of one client session.

    Calls must be serialized per instance. ``coefficient_source`` overrides the
    seeded random draw; it receives the window size and returns that many
    coefficients.
    """

    def __init__(
        self,
        subset_limit: int = DEFAULT_SUBSET_LIMIT,
        seed: int | None = None,
        coefficient_source: CoefficientSource | None = None,
    ):
        if subset_limit < 1:
            raise ValueError("subset_limit must be at least 1")
        self.subset_limit = subset_limit
        self.buffer: deque[NativeMessage] = deque()
        self.next_id = 1
        self.redundant_val = 0
        self.r_id = 0
        self.rng = random.Random(seed)
        self.coefficient_source = coefficient_source
        self.n_sent = 0
        self.n_additional = 0

    @property
    def window_full(self) -> bool:
        return len(self.buffer) >= self.subset_limit

    def _window(self) -> list[NativeMessage]:
        buf = self.buffer
        k = min(len(buf), self.subset_limit)
        return [buf[i] for i in range(len(buf) - k, len(buf))]

    def _coefficients(self, count: int) -> list[int]:
        if self.coefficient_source is not None:
            return list(self.coefficient_source(count))
        return random_coefficients(self.rng, count)

    def encode_window(self) -> CodedMessage:
        """A fresh random combination of the current window."""
        window = self._window()
        msg = combine(window, self._coefficients(len(window)))
        self.n_sent += 1
        return msg

    def submit(self, payload: bytes) -> CodedMessage:
        payload = bytes(payload)
        if not payload:
            raise ValueError("payload must not be empty")
        if len(payload) > MAX_LENGTH:
            raise ValueError(f"payload of {len(payload)} bytes exceeds the 32-bit length field")
        if self.window_full:
            raise WindowFull(
                f"{len(self.buffer)} unconfirmed messages fill the subset window"
            )
        self.buffer.append(NativeMessage(self.next_id, payload))
        self.next_id += 1
        return self.encode_window()

    def acknowledge(self, seen_newest: int) -> list[int]:
        """Drop buffered messages up to ``seen_newest``; returns the removed IDs."""
        removed = []
        while self.buffer and self.buffer[0].id <= seen_newest:
            removed.append(self.buffer.popleft().id)
        return removed

    def handle_response(self, resp: NcResponse) -> list[CodedMessage]:
        seen, unseen = resp.seen_newest, resp.unseen_newest
        if seen > unseen:
            raise InvalidResponse(f"seen_newest {seen} > unseen_newest {unseen}")
        self.acknowledge(seen)
        if unseen - seen > 0 and unseen > self.r_id and self.buffer:
            self.redundant_val = unseen - seen
            self.r_id = self.buffer[-1].id
            extra = [self.encode_window() for _ in range(self.redundant_val)]
            self.n_additional += len(extra)
            self.redundant_val = 0
            return extra
        return []

    def timeout(self) -> CodedMessage | None:
        """Re-emit one combination after a silent period; None if nothing is pending."""
        if not self.buffer:
            return None
        self.n_additional += 1
        return self.encode_window()

    def submit_bytes(self, payload: bytes) -> bytes:
        return serialize(self.submit(payload))

    def handle_response_bytes(self, data: bytes) -> list[bytes]:
        return [serialize(m) for m in self.handle_response(deserialize_response(data))]
