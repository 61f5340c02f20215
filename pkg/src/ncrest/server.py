"""Server NC layer: incremental Gauss-Jordan decoding with seen/unseen feedback."""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from .gf256 import INV_ARRAY, MUL_ARRAY
from .codec import CodedMessage, NativeMessage, NcResponse, deserialize, prune, serialize_response

log = logging.getLogger(__name__)

DeliveryCallback = Callable[[int, bytes], None]


class DecodingMatrix:
    """Coefficient and payload rows kept in reduced row-echelon form.

    Columns are message IDs. Every row has a pivot column holding 1, and in
    reduced form each pivot column is zero in every other row, so only the
    payload and the non-pivot ("unseen") columns are stored, side by side in
    one preallocated array so that a row operation is a single vectorised
    step over a contiguous slice:

        block[i, k]                payload byte k of row slot i, zero padded
        block[i, offset + j]       coefficient of row slot i on message slot_ids[j]

    Rows and unseen columns occupy unordered slots; ``pivots[i]`` is the
    pivot ID of row slot i. Entries outside the active region are garbage and
    get zeroed when a slot is activated.
    """

    def __init__(self, row_capacity: int = 32, col_capacity: int = 32, payload_capacity: int = 64):
        self.pivots: list[int] = []
        self.max_id = 0
        self.n_unseen = 0
        self.payload_width = 0
        self.offset = payload_capacity
        self.block = np.zeros((row_capacity, payload_capacity + col_capacity), dtype=np.uint8)
        self.slot_ids = np.zeros(col_capacity, dtype=np.int64)
        self.newly_decoded: list[int] = []
        self._row_of: dict[int, int] = {}
        self._col_of: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def unseen(self) -> list[int]:
        return sorted(int(i) for i in self.slot_ids[: self.n_unseen])

    def _reserve(self, rows: int, cols: int, width: int) -> None:
        r_cap, total = self.block.shape
        w_cap, c_cap = self.offset, total - self.offset
        if rows <= r_cap and cols <= c_cap and width <= w_cap:
            return
        r_new = r_cap if rows <= r_cap else max(rows, 2 * r_cap)
        c_new = c_cap if cols <= c_cap else max(cols, 2 * c_cap)
        w_new = w_cap if width <= w_cap else max(width, 2 * w_cap)
        grown = np.zeros((r_new, w_new + c_new), dtype=np.uint8)
        grown[:r_cap, :w_cap] = self.block[:, :w_cap]
        grown[:r_cap, w_new:w_new + c_cap] = self.block[:, w_cap:]
        self.block = grown
        self.offset = w_new
        if c_new > c_cap:
            ids = np.zeros(c_new, dtype=np.int64)
            ids[:c_cap] = self.slot_ids
            self.slot_ids = ids

    def _grow(self, fresh: list[int], payload_len: int) -> None:
        added = len(fresh)
        r = self.rank
        if added or payload_len > self.payload_width or r >= self.block.shape[0]:
            self._reserve(r + 1, self.n_unseen + added, payload_len)
        if added:
            o, j = self.offset, self.n_unseen
            self.block[:r, o + j:o + j + added] = 0
            self.slot_ids[j:j + added] = fresh
            for k, mid in enumerate(fresh):
                self._col_of[mid] = j + k
            self.n_unseen += added
            self.max_id = max(self.max_id, max(fresh))
        if payload_len > self.payload_width:
            self.block[:r, self.payload_width:payload_len] = 0
            self.payload_width = payload_len

    def insert(self, id_oldest: int, coefficients, payload: bytes) -> int | None:
        """Reduce a new row against the matrix and store it if innovative.

        ``coefficients[k]`` belongs to message ``id_oldest + k``. Returns the
        new pivot ID, or None when the row depends on rows already held.
        Rows that became fully decoded are listed in ``newly_decoded``.
        """
        self.newly_decoded = []
        col_of, row_of = self._col_of, self._row_of
        rows, factors, direct_ids, direct, fresh = [], [], [], [], []
        for k, c in enumerate(coefficients):
            if c:
                mid = id_oldest + k
                i = row_of.get(mid)
                if i is not None:
                    rows.append(i)
                    factors.append(c)
                else:
                    if mid not in col_of:
                        fresh.append(mid)
                    direct_ids.append(mid)
                    direct.append(c)
        self._grow(fresh, len(payload))
        M = self.block
        r, nu, o = self.rank, self.n_unseen, self.offset
        end = o + nu
        v = np.zeros(end, dtype=np.uint8)
        v[:len(payload)] = np.frombuffer(payload, dtype=np.uint8)
        if direct:
            v[[o + col_of[mid] for mid in direct_ids]] = direct
        if rows:
            f = np.array(factors, dtype=np.uint8)[:, None]
            v ^= np.bitwise_xor.reduce(MUL_ARRAY[f, M[rows, :end]], axis=0)

        nz = v[o:].nonzero()[0]
        if nz.size == 0:
            return None
        # leading entry = nonzero unseen column with the smallest message ID
        lead = int(nz[self.slot_ids[nz].argmin()]) if nz.size > 1 else int(nz[0])
        v = MUL_ARRAY[INV_ARRAY[v[o + lead]]][v]

        hit = ()
        dense = False
        if r:
            col = M[:r, o + lead].copy()
            hit = col.nonzero()[0]
            if hit.size > 32:
                # every multiple of v once, then one row lookup per matrix row;
                # MUL_ARRAY[0] is all zeros so untouched rows stay as they are
                dense = True
                M[:r, :end] ^= MUL_ARRAY[:, v].take(col, axis=0)
            elif hit.size:
                M[hit, :end] ^= MUL_ARRAY[col[hit][:, None], v]

        pivot = int(self.slot_ids[lead])
        last = nu - 1
        if lead != last:
            M[:r, o + lead] = M[:r, o + last]
            v[o + lead] = v[o + last]
            moved = int(self.slot_ids[last])
            self.slot_ids[lead] = moved
            col_of[moved] = lead
        del col_of[pivot]
        self.n_unseen = last

        M[r, :end] = v
        self.pivots.append(pivot)
        row_of[pivot] = r

        if dense:
            done = hit[~M[:r, o:o + last].any(axis=1)[hit]]
            self.newly_decoded = [self.pivots[i] for i in done.tolist()]
        elif len(hit):
            done = hit[~M[hit, o:o + last].any(axis=1)]
            self.newly_decoded = [self.pivots[i] for i in done.tolist()]
        if not v[o:o + last].any():
            self.newly_decoded.append(pivot)
        return pivot

    def decoded_pivots(self) -> list[int]:
        """Pivots whose row has no unseen terms left, i.e. decoded messages."""
        if self.n_unseen == 0:
            return list(self.pivots)
        o = self.offset
        live = self.block[: self.rank, o:o + self.n_unseen].any(axis=1)
        return [pid for pid, busy in zip(self.pivots, live.tolist()) if not busy]

    def is_decoded(self, pivot: int) -> bool:
        o = self.offset
        return not self.block[self._row_of[pivot], o:o + self.n_unseen].any()

    def payload(self, pivot: int) -> bytes:
        return self.block[self._row_of[pivot], : self.payload_width].tobytes()

    def remove(self, pivots) -> None:
        """Drop decoded rows; their pivot columns vanish with them.

        Callers guarantee every listed row is decoded.
        """
        for pid in pivots:
            i = self._row_of.pop(pid)
            last = self.rank - 1
            if i != last:
                self.block[i] = self.block[last]
                moved = self.pivots[last]
                self.pivots[i] = moved
                self._row_of[moved] = i
            self.pivots.pop()

    def columns(self) -> list[int]:
        return sorted(self.pivots + self.unseen)

    def coefficient_vector(self, pivot: int, columns: list[int] | None = None) -> list[int]:
        """The full coefficient row of ``pivot`` over ``columns`` (all by default)."""
        columns = self.columns() if columns is None else columns
        row = self.block[self._row_of[pivot], self.offset:]
        out = []
        for mid in columns:
            if mid == pivot:
                out.append(1)
            elif mid in self._col_of:
                out.append(int(row[self._col_of[mid]]))
            else:
                out.append(0)
        return out

    def as_lists(self) -> list[tuple[int, list[int]]]:
        """(pivot, coefficient row) pairs in pivot order, for display and checks."""
        cols = self.columns()
        return [(pid, self.coefficient_vector(pid, cols)) for pid in sorted(self.pivots)]


class NcServer:
    """Decoding side of one client session.

    ``receive`` must not be called concurrently for the same instance.
    """

    def __init__(self, on_deliver: DeliveryCallback | None = None):
        self.matrix = DecodingMatrix()
        self.seen: set[int] = set()
        self.delivered: set[int] = set()
        self.retained: dict[int, bytes] = {}
        self.retired: set[int] = set()
        self.lengths: dict[int, int] = {}
        self.max_id_observed = 0
        self.on_deliver = on_deliver
        self.n_received = 0
        self.n_dependent = 0
        self._prefix = 0
        self._retired_max = 0

    @property
    def seen_newest(self) -> int:
        return self._prefix

    @property
    def unseen_newest(self) -> int:
        return max(self.max_id_observed, self._prefix)

    def response(self) -> NcResponse:
        return NcResponse(self.seen_newest, self.unseen_newest)

    def receive(self, msg: CodedMessage) -> tuple[NcResponse, list[NativeMessage]]:
        h = msg.header
        self.n_received += 1
        self.cleanup(h.id_oldest)

        lengths = self.lengths
        for msg_id, length in zip(h.ids, h.lengths):
            if msg_id not in lengths and msg_id not in self.retired:
                lengths[msg_id] = length
        if h.id_newest > self.max_id_observed:
            self.max_id_observed = h.id_newest

        delivered: list[NativeMessage] = []
        if h.id_oldest <= self._retired_max and any(
            c and mid in self.retired for mid, c in zip(h.ids, h.coefficients)
        ):
            # Stale copy from before a retirement; those payloads are gone.
            log.debug("discarding coded message referencing retired IDs")
            self.n_dependent += 1
            return self.response(), delivered

        pivot = self.matrix.insert(h.id_oldest, h.coefficients, msg.payload)
        if pivot is None:
            self.n_dependent += 1
        else:
            self.seen.add(pivot)
            while self._prefix + 1 in self.seen:
                self._prefix += 1
            delivered = self._deliver_decoded()
        return self.response(), delivered

    def receive_bytes(self, data: bytes) -> tuple[bytes, list[NativeMessage]]:
        """Wire-level entry point: coded-message bytes in, response bytes out."""
        resp, delivered = self.receive(deserialize(data))
        return serialize_response(resp), delivered

    def _deliver_decoded(self) -> list[NativeMessage]:
        out = []
        for pid in sorted(self.matrix.newly_decoded):
            if pid in self.delivered:
                continue
            payload = prune(self.matrix.payload(pid), self.lengths[pid])
            self.delivered.add(pid)
            self.retained[pid] = payload
            out.append(NativeMessage(pid, payload))
            if self.on_deliver is not None:
                self.on_deliver(pid, payload)
        return out

    def cleanup(self, id_oldest: int) -> int:
        """Retire decoded messages with ID below ``id_oldest``.

        A seen but undecoded message below ``id_oldest`` keeps its row until it
        decodes; later headers retire it then.
        """
        if not self.retained or min(self.retained) >= id_oldest:
            return 0
        drop = [i for i in self.retained if i < id_oldest]
        self.matrix.remove(drop)
        for i in drop:
            del self.retained[i]
            del self.lengths[i]
            self.retired.add(i)
        self._retired_max = max(self._retired_max, max(drop))
        return len(drop)
