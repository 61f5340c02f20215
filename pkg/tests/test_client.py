import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncrest.client import NcClient, random_coefficients
from ncrest.codec import NcResponse, deserialize, serialize_response
from ncrest.errors import InvalidResponse, WindowFull


def fixed(*rows):
    it = iter(rows)
    return lambda k: next(it)


def test_first_submit_is_single_message():
    c = NcClient(seed=1)
    msg = c.submit(b"p1")
    assert list(msg.header.ids) == [1]
    assert msg.header.coefficients[0] != 0


def test_second_submit_combines_buffer():
    c = NcClient(coefficient_source=fixed([1], [1, 2]))
    c.submit(b"p1")
    msg = c.submit(b"p2")
    assert list(msg.header.ids) == [1, 2]
    assert msg.header.coefficients == (1, 2)


def test_window_full_leaves_buffer():
    c = NcClient(subset_limit=2, seed=0)
    for p in (b"p1", b"p2", b"p3", b"p4"):
        if c.window_full:
            c.acknowledge(c.buffer[0].id)
        c.submit(p)
    before = list(c.buffer)
    assert [m.id for m in before] == [3, 4]
    with pytest.raises(WindowFull):
        c.submit(b"p5")
    assert list(c.buffer) == before and c.next_id == 5


def test_submit_rejects_bad_payloads(monkeypatch):
    c = NcClient()
    with pytest.raises(ValueError):
        c.submit(b"")
    monkeypatch.setattr("ncrest.client.MAX_LENGTH", 4)
    with pytest.raises(ValueError):
        c.submit(b"12345")
    assert not c.buffer


def test_response_sequence_from_scenario():
    c = NcClient(coefficient_source=fixed([1], [1, 2], [1, 3, 2], [1, 4, 5, 1], [2, 3], [5, 6]))
    for i in range(1, 5):
        c.submit(f"p{i}".encode())

    extra = c.handle_response(NcResponse(2, 4))
    assert [m.id for m in c.buffer] == [3, 4]
    assert len(extra) == 2
    assert all(list(m.header.ids) == [3, 4] for m in extra)
    assert [m.header.coefficients for m in extra] == [(2, 3), (5, 6)]
    assert c.r_id == 4 and c.redundant_val == 0

    assert c.handle_response(NcResponse(3, 4)) == []
    assert [m.id for m in c.buffer] == [4]
    assert c.handle_response(NcResponse(4, 4)) == []
    assert not c.buffer
    assert c.n_additional == 2


def test_no_retrigger_on_same_unseen():
    c = NcClient(seed=3)
    for i in range(5):
        c.submit(bytes([i + 1]))
    assert len(c.handle_response(NcResponse(1, 5))) == 4
    assert c.handle_response(NcResponse(1, 5)) == []
    assert c.handle_response(NcResponse(2, 5)) == []


def test_invalid_response():
    c = NcClient()
    c.submit(b"x")
    with pytest.raises(InvalidResponse):
        c.handle_response(NcResponse(3, 2))


def test_timeout():
    c = NcClient(seed=0)
    assert c.timeout() is None
    c.submit(b"a")
    c.submit(b"b")
    msg = c.timeout()
    assert list(msg.header.ids) == [1, 2] and c.n_additional == 1


def test_bytes_interface():
    c = NcClient(seed=0)
    wire = c.submit_bytes(b"hello")
    assert deserialize(wire).payload != b""
    c.submit(b"world")
    extra = c.handle_response_bytes(serialize_response(NcResponse(0, 2)))
    assert len(extra) == 2 and all(list(deserialize(e).header.ids) == [1, 2] for e in extra)


def test_seeded_coefficients_reproducible():
    a, b = NcClient(seed=42), NcClient(seed=42)
    for i in range(10):
        assert a.submit(bytes([i + 1])) == b.submit(bytes([i + 1]))


@given(st.integers(1, 40), st.integers(0, 2**32))
def test_random_coefficients_shape(k, seed):
    import random

    coefs = random_coefficients(random.Random(seed), k)
    assert len(coefs) == k and coefs[-1] != 0 and all(0 <= x < 256 for x in coefs)


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), max_size=30),
       st.integers(1, 8))
def test_buffer_invariants(events, limit):
    c = NcClient(subset_limit=limit, seed=5)
    for a, b in events:
        seen, unseen = min(a, b), max(a, b)
        try:
            msg = c.submit(b"z")
            assert set(msg.header.ids) <= {m.id for m in c.buffer}
        except WindowFull:
            pass
        extra = c.handle_response(NcResponse(min(seen, c.next_id - 1), unseen))
        for m in extra:
            assert set(m.header.ids) <= {m2.id for m2 in c.buffer}
            assert len(m.header.ids) <= limit
        ids = [m.id for m in c.buffer]
        assert ids == list(range(ids[0], ids[0] + len(ids))) if ids else True
        assert c.redundant_val == 0 and c.r_id <= c.next_id - 1
