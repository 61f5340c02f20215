"""Closed-form expected additional request counts for REST and NC_REST."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError

REFERENCE_N = 1000
REFERENCE_ALPHAS = (0.3, 0.5, 0.7, 1.0)
CSV_FIELDS = ("alpha", "p", "a_wonc", "a_wnc", "increase_percent")


def a_wonc(n: float, p: float) -> float:
    """Expected additional requests for plain REST: n / (1 - p) - n."""
    if not 0.0 <= p < 1.0:
        raise DomainError(f"p={p} must lie in [0, 1)")
    return n / (1.0 - p) - n


def a_wnc(n: float, p: float, alpha: float) -> float:
    """Expected additional requests with network coding: n / (1 - alpha*p) - n."""
    if not 0.0 <= p < 1.0:
        raise DomainError(f"p={p} must lie in [0, 1)")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha={alpha} must lie in [0, 1]")
    q = alpha * p
    return n / (1.0 - q) - n


def increase_percent(wonc: float, wnc: float) -> float:
    """How much more REST sends than NC_REST, in percent of the NC_REST count."""
    if wnc == 0.0:
        return 0.0 if wonc == 0.0 else float("inf")
    return 100.0 * (wonc - wnc) / wnc


@dataclass(frozen=True)
class AnalysisPoint:
    n: int
    p: float
    alpha: float
    a_wonc: float
    a_wnc: float

    @property
    def increase_percent(self) -> float:
        return increase_percent(self.a_wonc, self.a_wnc)

    def csv_row(self) -> dict:
        return {
            "alpha": self.alpha,
            "p": self.p,
            "a_wonc": f"{self.a_wonc:.6f}",
            "a_wnc": f"{self.a_wnc:.6f}",
            "increase_percent": f"{self.increase_percent:.6f}",
        }


def evaluate(n: int, p: float, alpha: float) -> AnalysisPoint:
    return AnalysisPoint(n, p, alpha, a_wonc(n, p), a_wnc(n, p, alpha))


def sweep(n: int, alphas: Sequence[float], p_grid: Sequence[float]) -> list[AnalysisPoint]:
    """Evaluate both formulas over alphas x p_grid, alpha-major."""
    return [evaluate(n, p, a) for a in alphas for p in p_grid]


def reference_p_grid(step: float = 0.05) -> list[float]:
    return grid(0.0, 0.9, step)


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, rounded to suppress float drift."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    if stop < start:
        raise ValueError("grid stop must not precede start")
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def write_csv(points: Iterable[AnalysisPoint], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for pt in points:
        writer.writerow(pt.csv_row())
