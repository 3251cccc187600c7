"""Per-round cost and run/experiment summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

INFINITE = math.inf


def round_cost(calls: int, fresh: int) -> float:
    """Calls spent per freshly informed node; ``INFINITE`` when nobody new was reached."""
    if calls < 0:
        raise ValueError("calls must be non-negative")
    if fresh == 0:
        return INFINITE
    return calls / fresh


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    spreaders_begin: int
    fresh: int
    calls: int
    cost: float
    mode: str = ""

    @property
    def spreaders_end(self) -> int:
        return self.spreaders_begin + self.fresh


@dataclass
class RunResult:
    n: int
    rounds: list[RoundMetrics]
    completed: bool
    total_calls: int
    mean_round_cost: float | None
    normalized_cost: float | None
    initiator: int | None = None
    initiator_degree: int | None = None
    trace: list | None = field(default=None, repr=False, compare=False)

    @property
    def total_rounds(self) -> int:
        return len(self.rounds)

    @property
    def final_spreaders(self) -> int:
        return self.rounds[-1].spreaders_end if self.rounds else (self.n if self.completed else 1)

    def spreader_curve(self) -> list[int]:
        """Spreader count after each round, starting with the lone initiator at index 0."""
        start = self.rounds[0].spreaders_begin if self.rounds else self.final_spreaders
        return [start] + [r.spreaders_end for r in self.rounds]


def summarize_run(
    rounds: Sequence[RoundMetrics],
    n: int,
    completed: bool | None = None,
    initiator: int | None = None,
    initiator_degree: int | None = None,
) -> RunResult:
    for i, r in enumerate(rounds, start=1):
        if r.round != i:
            raise ValueError(f"round indices must run 1, 2, ...; got {r.round} at position {i}")
    finite = [r.cost for r in rounds if math.isfinite(r.cost)]
    total_calls = sum(r.calls for r in rounds)
    if completed is None:
        completed = (rounds[-1].spreaders_end if rounds else 1) == n
    return RunResult(
        n=n,
        rounds=list(rounds),
        completed=completed,
        total_calls=total_calls,
        mean_round_cost=math.fsum(finite) / len(finite) if finite else None,
        normalized_cost=total_calls / (n - 1) if n >= 2 else None,
        initiator=initiator,
        initiator_degree=initiator_degree,
    )


@dataclass(frozen=True)
class Stat:
    mean: float | None
    std: float | None
    min: float | None
    max: float | None
    count: int


def _stat(values: Sequence[float | None]) -> Stat:
    # sorted + fsum keeps the result independent of input order
    xs = sorted(v for v in values if v is not None)
    if not xs:
        return Stat(None, None, None, None, 0)
    mean = math.fsum(xs) / len(xs)
    if len(xs) > 1:
        std = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1))
    else:
        std = 0.0
    return Stat(mean, std, xs[0], xs[-1], len(xs))


@dataclass(frozen=True)
class AggregateResult:
    runs: int
    n: int
    mean_round_cost: Stat
    normalized_cost: Stat
    total_rounds: Stat
    completed_runs: int
    spreader_curve: list[float] = field(default_factory=list)


def aggregate(results: Sequence[RunResult]) -> AggregateResult:
    if not results:
        raise ValueError("cannot aggregate an empty result list")
    n = results[0].n
    if any(r.n != n for r in results):
        raise ValueError("all runs must share the same node count")
    curves = [r.spreader_curve() for r in results]
    width = max(len(c) for c in curves)
    padded = np.full((len(curves), width), n, dtype=np.int64)
    for i, c in enumerate(curves):
        padded[i, :len(c)] = c
    # integer column sums are exact, so order cannot matter
    curve = (padded.sum(axis=0) / len(curves)).tolist()
    return AggregateResult(
        runs=len(results),
        n=n,
        mean_round_cost=_stat([r.mean_round_cost for r in results]),
        normalized_cost=_stat([r.normalized_cost for r in results]),
        total_rounds=_stat([r.total_rounds for r in results]),
        completed_runs=sum(r.completed for r in results),
        spreader_curve=curve,
    )
