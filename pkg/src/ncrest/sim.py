"""Round-based simulation of NC_REST and plain REST over a lossy channel.

Loss model: a round trip fails with probability ``p``; the request direction
carries ``alpha * p`` and the response direction the remainder, so that
``1 - (1 - q_req) * (1 - q_resp) == p``.

NC timing, per round: responses emitted in the previous round reach the
client (possibly triggering additional combinations), then the REST layer
submits its next request, then every queued transmission crosses the channel
and the server answers immediately. Answers land in the following round.
"""

from __future__ import annotations

import csv
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Protocol

from .client import DEFAULT_SUBSET_LIMIT, CoefficientSource, NcClient
from .errors import DomainError, NonConvergence, WindowFull
from .server import NcServer

DEFAULT_TIMEOUT_ROUNDS = 3
# Window used for Monte-Carlo sweeps. At 16 the client stalls on WindowFull
# under heavy loss and overshoots the closed form by up to ~40%.
SIM_SUBSET_LIMIT = 32
CSV_FIELDS = (
    "n", "p", "alpha", "seed", "mode",
    "n_request_transmissions", "n_additional", "n_delivered", "elapsed_rounds",
)

Listener = Callable[..., None]


@dataclass(frozen=True)
class LossModel:
    p: float
    alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise DomainError(f"loss probability p={self.p} must lie in [0, 1)")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha={self.alpha} must lie in [0, 1]")

    @property
    def q_req(self) -> float:
        return self.alpha * self.p

    @property
    def q_resp(self) -> float:
        return (1.0 - self.alpha) * self.p / (1.0 - self.alpha * self.p)


class Channel(Protocol):
    def request_lost(self) -> bool: ...

    def response_lost(self) -> bool: ...


class BernoulliChannel:
    def __init__(self, loss: LossModel):
        self.q_req = loss.q_req
        self.q_resp = loss.q_resp
        self._rng = random.Random(f"channel:{loss.seed}")

    def request_lost(self) -> bool:
        return self._rng.random() < self.q_req

    def response_lost(self) -> bool:
        return self._rng.random() < self.q_resp


class ScriptedChannel:
    """Drops exactly the listed transmissions (1-based, in send order).

    A response is numbered by the request transmission that caused it.
    """

    def __init__(self, drop_requests: Iterable[int] = (), drop_responses: Iterable[int] = ()):
        self.drop_requests = frozenset(drop_requests)
        self.drop_responses = frozenset(drop_responses)
        self._sent = 0

    def request_lost(self) -> bool:
        self._sent += 1
        return self._sent in self.drop_requests

    def response_lost(self) -> bool:
        return self._sent in self.drop_responses


@dataclass
class SimResult:
    n_submitted: int
    n_request_transmissions: int
    n_delivered: int
    n_responses_sent: int
    elapsed_rounds: int

    @property
    def n_additional(self) -> int:
        return self.n_request_transmissions - self.n_submitted

    def csv_row(self, n: int, p: float, alpha: float, seed: Any, mode: str) -> dict:
        return {
            "n": n, "p": p, "alpha": alpha, "seed": seed, "mode": mode,
            "n_request_transmissions": self.n_request_transmissions,
            "n_additional": self.n_additional,
            "n_delivered": self.n_delivered,
            "elapsed_rounds": self.elapsed_rounds,
        }


def request_payload(i: int) -> bytes:
    """Stand-in REST request body for message ``i``."""
    return f"POST /vehicles/{i}/position HTTP/1.1\r\n\r\n{{\"seq\":{i}}}".encode()


def _default_round_cap(n: int, loss: LossModel, timeout_rounds: int) -> int:
    return int(50 * (n + 50) * (timeout_rounds + 1) / (1.0 - loss.p)) + 1000


class NcSimulation:
    """One NC_REST session driven to completion.

    ``listener(event, **info)`` is called for every transmission, loss,
    response, and delivery; ``trace`` and the property tests hook in there.
    """

    def __init__(
        self,
        n: int,
        loss: LossModel,
        subset_limit: int = DEFAULT_SUBSET_LIMIT,
        timeout_rounds: int = DEFAULT_TIMEOUT_ROUNDS,
        *,
        channel: Channel | None = None,
        coefficient_source: CoefficientSource | None = None,
        max_rounds: int | None = None,
        listener: Listener | None = None,
    ):
        if n < 1:
            raise ValueError("n must be at least 1")
        if timeout_rounds < 1:
            raise ValueError("timeout_rounds must be at least 1")
        self.n = n
        self.loss = loss
        self.timeout_rounds = timeout_rounds
        self.channel = channel if channel is not None else BernoulliChannel(loss)
        self.client = NcClient(subset_limit, seed=loss.seed, coefficient_source=coefficient_source)
        self.server = NcServer()
        self.max_rounds = max_rounds or _default_round_cap(n, loss, timeout_rounds)
        self.listener = listener
        self.payloads = [request_payload(i) for i in range(1, n + 1)]
        self.delivered: dict[int, bytes] = {}
        self.duplicates: list[int] = []

    def _emit(self, event: str, **info) -> None:
        if self.listener is not None:
            self.listener(event, sim=self, **info)

    def run(self) -> SimResult:
        client, server, channel = self.client, self.server, self.channel
        emit = self._emit if self.listener is not None else None
        n = self.n
        in_flight = []
        next_payload = 0
        transmissions = responses = 0
        idle = 0
        rnd = 0
        while len(self.delivered) < n or in_flight:
            rnd += 1
            if rnd > self.max_rounds:
                raise NonConvergence(
                    f"{len(self.delivered)}/{n} delivered after {rnd - 1} rounds "
                    f"(buffer={[m.id for m in client.buffer]}, seen_newest={server.seen_newest}, "
                    f"unseen_newest={server.unseen_newest}, rank={server.matrix.rank})"
                )
            outgoing = []
            arrived, in_flight = in_flight, []
            for resp in arrived:
                if emit:
                    emit("response", round=rnd, response=resp)
                    before = [m.id for m in client.buffer]
                extra = client.handle_response(resp)
                if emit:
                    removed = before[: len(before) - len(client.buffer)]
                    if removed:
                        emit("removed", round=rnd, ids=removed)
                for msg in extra:
                    outgoing.append(("additional", msg))

            submitted = False
            if next_payload < n:
                try:
                    msg = client.submit(self.payloads[next_payload])
                except WindowFull:
                    if emit:
                        emit("window_full", round=rnd)
                else:
                    next_payload += 1
                    submitted = True
                    outgoing.append(("new", msg))

            if arrived or submitted:
                idle = 0
            elif client.buffer:
                idle += 1
                if idle >= self.timeout_rounds:
                    idle = 0
                    outgoing.append(("timeout", client.timeout()))

            for kind, msg in outgoing:
                transmissions += 1
                if emit:
                    emit("request", round=rnd, kind=kind, message=msg, index=transmissions)
                if channel.request_lost():
                    if emit:
                        emit("request_lost", round=rnd, message=msg, index=transmissions)
                    continue
                resp, decoded = server.receive(msg)
                responses += 1
                for native in decoded:
                    if native.id in self.delivered:
                        self.duplicates.append(native.id)
                    self.delivered[native.id] = native.payload
                if emit:
                    emit("server", round=rnd, message=msg, response=resp, decoded=decoded)
                if channel.response_lost():
                    if emit:
                        emit("response_lost", round=rnd, response=resp, index=transmissions)
                    continue
                in_flight.append(resp)

        return SimResult(
            n_submitted=n,
            n_request_transmissions=transmissions,
            n_delivered=len(self.delivered),
            n_responses_sent=responses,
            elapsed_rounds=rnd,
        )


def run_nc(
    n: int,
    loss: LossModel,
    subset_limit: int = DEFAULT_SUBSET_LIMIT,
    timeout_rounds: int = DEFAULT_TIMEOUT_ROUNDS,
    **kwargs,
) -> SimResult:
    return NcSimulation(n, loss, subset_limit, timeout_rounds, **kwargs).run()


def run_rest_baseline(
    n: int,
    loss: LossModel,
    timeout_rounds: int = DEFAULT_TIMEOUT_ROUNDS,
    *,
    channel: Channel | None = None,
    max_rounds: int | None = None,
) -> SimResult:
    """Stop-and-wait REST: resend each request on timeout until its response arrives.

    A resend counts as additional even if the server already applied the
    update and only the response was lost.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    channel = channel if channel is not None else BernoulliChannel(loss)
    max_rounds = max_rounds or _default_round_cap(n, loss, timeout_rounds)
    applied: set[int] = set()
    transmissions = responses = rnd = 0
    for i in range(1, n + 1):
        while True:
            if rnd >= max_rounds:
                raise NonConvergence(f"request {i}/{n} still unacknowledged after {rnd} rounds")
            transmissions += 1
            if channel.request_lost():
                rnd += timeout_rounds
                continue
            applied.add(i)
            responses += 1
            if channel.response_lost():
                rnd += timeout_rounds
                continue
            rnd += 1
            break
    return SimResult(
        n_submitted=n,
        n_request_transmissions=transmissions,
        n_delivered=len(applied),
        n_responses_sent=responses,
        elapsed_rounds=rnd,
    )


@dataclass
class MonteCarloSummary:
    mode: str
    n: int
    p: float
    alpha: float
    results: list[SimResult] = field(default_factory=list)

    @property
    def mean_additional(self) -> float:
        return sum(r.n_additional for r in self.results) / len(self.results)

    def mean_row(self) -> dict:
        k = len(self.results)
        return {
            "n": self.n, "p": self.p, "alpha": self.alpha, "seed": "mean", "mode": self.mode,
            "n_request_transmissions": sum(r.n_request_transmissions for r in self.results) / k,
            "n_additional": self.mean_additional,
            "n_delivered": sum(r.n_delivered for r in self.results) / k,
            "elapsed_rounds": sum(r.elapsed_rounds for r in self.results) / k,
        }


def monte_carlo(
    mode: str,
    n: int,
    p: float,
    alpha: float,
    seeds: Iterable[int],
    subset_limit: int = SIM_SUBSET_LIMIT,
    timeout_rounds: int = DEFAULT_TIMEOUT_ROUNDS,
) -> MonteCarloSummary:
    summary = MonteCarloSummary(mode, n, p, alpha)
    for seed in seeds:
        loss = LossModel(p, alpha, seed)
        if mode == "nc":
            res = run_nc(n, loss, subset_limit, timeout_rounds)
        elif mode == "rest":
            res = run_rest_baseline(n, loss, timeout_rounds)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        summary.results.append(res)
    return summary


def write_csv(rows: Iterable[dict], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
