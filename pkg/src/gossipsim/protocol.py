"""Round-synchronous gossip engines and the push-then-pull orchestrator.

Every engine decides from the state at the start of the round and applies all
deliveries together at the end, so a node informed in round ``r`` first acts in
round ``r + 1``. One call (a push transmission or a pull request, successful or
not) costs one unit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import MIN_DEGREE, Graph, InitiatorPolicy, ParameterError, RichNeighbourTable, build_rich_table, select_initiator
from .metrics import RoundMetrics, RunResult, round_cost, summarize_run


class Variant(enum.Enum):
    PUSH = "push"
    PULL = "pull"
    PUSH_PULL = "push-pull"
    DIFFERENTIAL_PUSH = "differential-push"
    FPTP = "fptp"
    ADAPTIVE_PUSH = "adaptive-push"
    ADAPTIVE_PULL = "adaptive-pull"
    ADAPTIVE_FPTP = "adaptive-fptp"

    @property
    def is_fptp(self) -> bool:
        return self in (Variant.FPTP, Variant.ADAPTIVE_FPTP)

    @property
    def is_adaptive(self) -> bool:
        return self in (Variant.ADAPTIVE_PUSH, Variant.ADAPTIVE_PULL, Variant.ADAPTIVE_FPTP)


def default_tr(n: int) -> int:
    """Transition round nearest to log2(n), at least 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(1, math.floor(math.log2(n) + 0.5))


@dataclass(frozen=True)
class SimConfig:
    variant: Variant
    tr: int | None = None
    initiator: InitiatorPolicy = MIN_DEGREE
    max_rounds: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.tr is not None and self.tr < 1:
            raise ParameterError(f"transition round must be >= 1, got {self.tr}")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ParameterError(f"max_rounds must be >= 1, got {self.max_rounds}")

    def transition_round(self, n: int) -> int:
        return default_tr(n) if self.tr is None else self.tr

    def round_cap(self, n: int) -> int:
        return 10 * n if self.max_rounds is None else self.max_rounds


@dataclass(frozen=True)
class NodeStatus:
    spreader: bool
    has_transmitted: bool
    informed_round: int | None
    pull_attempts: int


@dataclass(frozen=True)
class CallLog:
    """Every call made in one round: ``callers[i]`` contacted ``targets[i]``."""

    round: int
    mode: str
    callers: np.ndarray
    targets: np.ndarray


@dataclass
class SimState:
    graph: Graph
    rich: RichNeighbourTable | None
    informed: np.ndarray
    has_transmitted: np.ndarray
    informed_round: np.ndarray
    pull_attempts: np.ndarray
    current_round: int = 0
    spreader_count: int = 0
    initiator: int = -1
    fanout: np.ndarray | None = field(default=None, repr=False)
    trace: list[CallLog] | None = field(default=None, repr=False)

    def status(self, v: int) -> NodeStatus:
        r = int(self.informed_round[v])
        return NodeStatus(
            spreader=bool(self.informed[v]),
            has_transmitted=bool(self.has_transmitted[v]),
            informed_round=None if r < 0 else r,
            pull_attempts=int(self.pull_attempts[v]),
        )

    @property
    def done(self) -> bool:
        return self.spreader_count == self.graph.node_count

    def rich_table(self) -> RichNeighbourTable:
        if self.rich is None:
            self.rich = build_rich_table(self.graph)
        return self.rich


def init_sim(
    g: Graph,
    rich: RichNeighbourTable | None,
    cfg: SimConfig,
    rng: np.random.Generator,
    trace: bool = False,
) -> SimState:
    n = g.node_count
    source = select_initiator(g, cfg.initiator, rng)
    s = SimState(
        graph=g,
        rich=rich,
        informed=np.zeros(n, dtype=bool),
        has_transmitted=np.zeros(n, dtype=bool),
        informed_round=np.full(n, -1, dtype=np.int64),
        pull_attempts=np.zeros(n, dtype=np.int64),
        trace=[] if trace else None,
    )
    s.informed[source] = True
    s.informed_round[source] = 0
    s.spreader_count = 1
    s.initiator = source
    return s


def _random_neighbours(g: Graph, nodes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return g.indices[g.indptr[nodes] + rng.integers(0, g.degrees[nodes])]


def _callers(s: SimState, spreaders: bool) -> np.ndarray:
    mask = s.informed if spreaders else ~s.informed
    return np.flatnonzero(mask & (s.graph.degrees > 0))


def _deliver(s: SimState, mode: str, callers: np.ndarray, targets: np.ndarray, newly: np.ndarray) -> RoundMetrics:
    """Apply the round's deliveries; ``newly`` may hold repeats and already-informed ids."""
    s.current_round += 1
    begin = s.spreader_count
    hit = np.zeros(s.graph.node_count, dtype=bool)
    hit[newly] = True
    hit &= ~s.informed
    fresh = int(hit.sum())
    s.informed |= hit
    s.informed_round[hit] = s.current_round
    s.spreader_count += fresh
    if s.trace is not None:
        s.trace.append(CallLog(s.current_round, mode, callers.copy(), targets.copy()))
    calls = int(callers.size)
    return RoundMetrics(s.current_round, begin, fresh, calls, round_cost(calls, fresh), mode)


def round_push(s: SimState, rng: np.random.Generator) -> RoundMetrics:
    senders = _callers(s, spreaders=True)
    targets = _random_neighbours(s.graph, senders, rng)
    s.has_transmitted[senders] = True
    return _deliver(s, "push", senders, targets, targets)


def round_pull(s: SimState, rng: np.random.Generator) -> RoundMetrics:
    askers = _callers(s, spreaders=False)
    targets = _random_neighbours(s.graph, askers, rng)
    s.pull_attempts[askers] += 1
    return _deliver(s, "pull", askers, targets, askers[s.informed[targets]])


def round_push_pull(s: SimState, rng: np.random.Generator) -> RoundMetrics:
    callers = np.flatnonzero(s.graph.degrees > 0)
    targets = _random_neighbours(s.graph, callers, rng)
    a, b = s.informed[callers], s.informed[targets]
    newly = np.concatenate([targets[a & ~b], callers[b & ~a]])
    s.has_transmitted[callers[a]] = True
    return _deliver(s, "push-pull", callers, targets, newly)


def differential_fanout(g: Graph) -> np.ndarray:
    """Per-node fan-out: degree over mean neighbour degree, rounded half up, clamped to [1, degree]."""
    deg = g.degrees
    src = np.repeat(np.arange(g.node_count), deg)
    nbr_sum = np.bincount(src, weights=deg[g.indices], minlength=g.node_count)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(deg > 0, deg * deg / np.where(nbr_sum > 0, nbr_sum, 1), 0.0)
    k = np.floor(ratio + 0.5).astype(np.int64)
    return np.clip(k, np.minimum(1, deg), deg)


def round_differential_push(s: SimState, rng: np.random.Generator) -> RoundMetrics:
    g = s.graph
    if s.fanout is None:
        s.fanout = differential_fanout(g)
    fanout = s.fanout
    senders = _callers(s, spreaders=True)
    deg = g.degrees[senders]
    # shuffle each sender's neighbour slots by random keys and keep the first k
    seg = np.repeat(np.arange(senders.size), deg)
    seg_start = np.cumsum(deg) - deg
    slots = g.indptr[senders][seg] + (np.arange(seg.size) - seg_start[seg])
    order = np.lexsort((rng.random(seg.size), seg))
    rank = np.arange(seg.size) - seg_start[seg]
    chosen = order[rank < fanout[senders][seg]]
    callers = senders[seg[chosen]]
    targets = g.indices[slots[chosen]]
    s.has_transmitted[senders] = True
    return _deliver(s, "push", callers, targets, targets)


def round_adaptive_push(s: SimState, rng: np.random.Generator) -> RoundMetrics:
    rich = s.rich_table().rich
    senders = _callers(s, spreaders=True)
    first = ~s.has_transmitted[senders]
    targets = np.empty_like(senders)
    targets[first] = rich[senders[first]]
    targets[~first] = _random_neighbours(s.graph, senders[~first], rng)
    s.has_transmitted[senders] = True
    return _deliver(s, "push", senders, targets, targets)


def round_adaptive_pull(s: SimState, rng: np.random.Generator) -> RoundMetrics:
    rich = s.rich_table().rich
    askers = _callers(s, spreaders=False)
    ask_rich = s.pull_attempts[askers] % 2 == 0
    targets = np.empty_like(askers)
    targets[ask_rich] = rich[askers[ask_rich]]
    targets[~ask_rich] = _random_neighbours(s.graph, askers[~ask_rich], rng)
    s.pull_attempts[askers] += 1
    return _deliver(s, "pull", askers, targets, askers[s.informed[targets]])


Engine = Callable[[SimState, np.random.Generator], RoundMetrics]

_FIXED_ENGINES: dict[Variant, Engine] = {
    Variant.PUSH: round_push,
    Variant.PULL: round_pull,
    Variant.PUSH_PULL: round_push_pull,
    Variant.DIFFERENTIAL_PUSH: round_differential_push,
    Variant.ADAPTIVE_PUSH: round_adaptive_push,
    Variant.ADAPTIVE_PULL: round_adaptive_pull,
}


def engine_for(variant: Variant, round_index: int, tr: int) -> Engine:
    if variant is Variant.FPTP:
        return round_push if round_index < tr else round_pull
    if variant is Variant.ADAPTIVE_FPTP:
        return round_adaptive_push if round_index < tr else round_adaptive_pull
    return _FIXED_ENGINES[variant]


def simulate(
    g: Graph, rich: RichNeighbourTable | None, cfg: SimConfig, trace: bool = False
) -> tuple[SimState, RunResult]:
    """Like :func:`run`, but also hands back the final node states."""
    n = g.node_count
    if cfg.variant.is_adaptive and rich is None and n > 1:
        rich = build_rich_table(g)
    rng = np.random.default_rng(cfg.seed)
    s = init_sim(g, rich, cfg, rng, trace=trace)
    tr = cfg.transition_round(n)
    cap = cfg.round_cap(n)
    rounds = []
    while not s.done and s.current_round < cap:
        rounds.append(engine_for(cfg.variant, s.current_round + 1, tr)(s, rng))
    result = summarize_run(
        rounds, n, completed=s.done, initiator=s.initiator, initiator_degree=g.degree(s.initiator)
    )
    result.trace = s.trace
    return s, result


def run(g: Graph, rich: RichNeighbourTable | None, cfg: SimConfig, trace: bool = False) -> RunResult:
    """Simulate until every node is informed or the round cap is hit.

    Push-then-pull variants use push mode for rounds ``r < tr`` and pull mode
    from ``tr`` on, so ``tr=1`` is pure pull.
    """
    return simulate(g, rich, cfg, trace)[1]
