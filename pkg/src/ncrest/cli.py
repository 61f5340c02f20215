"""Command-line front end: ``ncrest analyze|simulate|trace|reproduce-fig5``."""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

from . import analysis
from .errors import DomainError, NonConvergence
from .sim import (
    DEFAULT_TIMEOUT_ROUNDS,
    SIM_SUBSET_LIMIT,
    LossModel,
    ScriptedChannel,
    monte_carlo,
    run_nc,
    write_csv,
)

log = logging.getLogger("ncrest")

# The request/response exchange walked through for four POST requests:
# request 1 and 3 are lost, the response to request 2 is lost.
TRACE_DROP_REQUESTS = (1, 3)
TRACE_DROP_RESPONSES = (2,)
TRACE_COEFFICIENTS = ((1,), (1, 2), (1, 3, 2), (1, 4, 5, 1), (2, 3), (5, 6))
# Responses emitted by the server, including the lost first one.
TRACE_EXPECTED = ((1, 2), (2, 4), (3, 4), (4, 4))


def parse_floats(spec: str) -> list[float]:
    """``a,b,c`` lists, ``start:stop:step`` inclusive grids, or a single value."""
    out: list[float] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            fields = part.split(":")
            if len(fields) != 3:
                raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {part!r}")
            try:
                start, stop, step = map(float, fields)
                out.extend(analysis.grid(start, stop, step))
            except ValueError as exc:
                raise argparse.ArgumentTypeError(str(exc)) from None
        else:
            try:
                out.append(float(part))
            except ValueError:
                raise argparse.ArgumentTypeError(f"not a number: {part!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty value list")
    return out


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


@contextlib.contextmanager
def open_output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
        return
    with open(path, "w", newline="") as fh:
        yield fh


def cmd_analyze(args) -> int:
    points = analysis.sweep(args.n, args.alpha, args.p)
    with open_output(args.output) as fh:
        analysis.write_csv(points, fh)
    return 0


def cmd_reproduce_fig5(args) -> int:
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    p_grid = analysis.reference_p_grid(args.step)
    points = analysis.sweep(analysis.REFERENCE_N, analysis.REFERENCE_ALPHAS, p_grid)
    with open(out_dir / "fig5_all.csv", "w", newline="") as fh:
        analysis.write_csv(points, fh)
    for alpha in analysis.REFERENCE_ALPHAS:
        name = f"fig5_alpha_{alpha:g}.csv"
        with open(out_dir / name, "w", newline="") as fh:
            analysis.write_csv([pt for pt in points if pt.alpha == alpha], fh)
    print(f"wrote {len(points)} points to {out_dir}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    seeds = range(args.seed_base, args.seed_base + args.seeds)
    rows, means = [], []
    for p in args.p:
        for alpha in args.alpha:
            LossModel(p, alpha)  # validate before doing any work
            for mode in ("nc", "rest"):
                summary = monte_carlo(mode, args.n, p, alpha, seeds, args.subset_limit, args.timeout_rounds)
                rows.extend(r.csv_row(args.n, p, alpha, s, mode) for s, r in zip(seeds, summary.results))
                means.append(summary.mean_row())
                expected = analysis.a_wnc(args.n, p, alpha) if mode == "nc" else analysis.a_wonc(args.n, p)
                log.info("p=%g alpha=%g %s: mean additional %.3f (closed form %.3f)",
                         p, alpha, mode, summary.mean_additional, expected)
    with open_output(args.output) as fh:
        write_csv(rows + means, fh)
    return 0


def run_trace(out=None) -> tuple[bool, list]:
    """Replay the four-request scenario; returns (matches, events)."""
    out = out if out is not None else sys.stdout
    coefs = iter(TRACE_COEFFICIENTS)
    responses = []
    events = []

    def fmt_combo(msg) -> str:
        h = msg.header
        terms = [f"{c}p{i}" if c != 1 else f"p{i}" for i, c in zip(h.ids, h.coefficients) if c]
        return "+".join(terms)

    def listener(event, sim, **info):
        events.append((event, info))
        if event == "request":
            print(f"[round {info['round']}] client -> server #{info['index']} ({info['kind']}): "
                  f"{fmt_combo(info['message'])}", file=out)
        elif event == "request_lost":
            print(f"    request #{info['index']} LOST", file=out)
        elif event == "server":
            resp = info["response"]
            responses.append((resp.seen_newest, resp.unseen_newest))
            print(f"    server GJE -> {resp}", file=out)
            for pivot, row in sim.server.matrix.as_lists():
                print(f"      p{pivot}: {row}", file=out)
            for native in info["decoded"]:
                print(f"      decoded p{native.id}: {native.payload!r}", file=out)
        elif event == "response_lost":
            print(f"    {info['response']} LOST", file=out)
        elif event == "response":
            print(f"[round {info['round']}] client <- {info['response']}", file=out)
        elif event == "removed":
            print(f"    client drops {', '.join(f'p{i}' for i in info['ids'])} from its buffer", file=out)

    result = run_nc(
        4,
        LossModel(0.0),
        channel=ScriptedChannel(TRACE_DROP_REQUESTS, TRACE_DROP_RESPONSES),
        coefficient_source=lambda k: next(coefs),
        listener=listener,
    )
    print(f"additional combinations: {result.n_additional}; delivered: {result.n_delivered}/4", file=out)
    ok = tuple(responses) == TRACE_EXPECTED and result.n_additional == 2 and result.n_delivered == 4
    print("trace OK" if ok else f"trace DIVERGED: responses {responses}", file=out)
    return ok, events


def cmd_trace(args) -> int:
    ok, _ = run_trace()
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncrest", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form sweep as CSV")
    p.add_argument("--n", type=positive_int, default=analysis.REFERENCE_N)
    p.add_argument("--alpha", type=parse_floats, default=list(analysis.REFERENCE_ALPHAS))
    p.add_argument("--p", type=parse_floats, default=analysis.reference_p_grid())
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte-Carlo NC_REST vs REST as CSV")
    p.add_argument("--n", type=positive_int, default=analysis.REFERENCE_N)
    p.add_argument("--p", type=parse_floats, required=True)
    p.add_argument("--alpha", type=parse_floats, default=[1.0])
    p.add_argument("--seeds", type=positive_int, default=100)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--subset-limit", type=positive_int, default=SIM_SUBSET_LIMIT)
    p.add_argument("--timeout-rounds", type=positive_int, default=DEFAULT_TIMEOUT_ROUNDS)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("trace", help="replay the four-request lossy exchange")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("reproduce-fig5", help="closed-form curves for alpha in 0.3/0.5/0.7/1")
    p.add_argument("--output-dir", default="fig5")
    p.add_argument("--step", type=float, default=0.05)
    p.set_defaults(func=cmd_reproduce_fig5)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"ncrest: domain error: {exc}", file=sys.stderr)
        return 2
    except NonConvergence as exc:
        print(f"ncrest: simulation did not converge: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"ncrest: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
