"""Seeded Monte-Carlo experiments: repeated runs, transition-round sweeps, protocol tables."""

from __future__ import annotations

import dataclasses
import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import MIN_DEGREE, BaParams, Graph, InitiatorPolicy, build_rich_table, generate_ba
from .metrics import AggregateResult, RunResult, aggregate
from .protocol import SimConfig, Variant, default_tr, run


class GraphMode(enum.Enum):
    REGENERATE = "regenerate"
    FIXED = "fixed"


@dataclass(frozen=True)
class ExperimentSpec:
    ba: BaParams
    runs: int = 1000
    graph_mode: GraphMode = GraphMode.REGENERATE
    base_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")


def run_seeds(base_seed: int, index: int) -> tuple[int, int]:
    """(graph seed, simulation seed) for run ``index``; a pure function of its inputs."""
    state = np.random.SeedSequence(base_seed, spawn_key=(index,)).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def _run_one(spec: ExperimentSpec, cfgs: Sequence[SimConfig], index: int) -> list[RunResult]:
    graph_seed, sim_seed = run_seeds(spec.base_seed, index)
    if spec.graph_mode is GraphMode.FIXED:
        g = _fixed_graph(spec.ba)
    else:
        g = generate_ba(dataclasses.replace(spec.ba, seed=graph_seed))
    rich = build_rich_table(g) if g.node_count > 1 else None
    return [run(g, rich, dataclasses.replace(cfg, seed=sim_seed)) for cfg in cfgs]


_fixed_cache: dict[BaParams, Graph] = {}


def _fixed_graph(ba: BaParams) -> Graph:
    if ba not in _fixed_cache:
        _fixed_cache.clear()
        _fixed_cache[ba] = generate_ba(ba)
    return _fixed_cache[ba]


def _run_batch(args: tuple[ExperimentSpec, Sequence[SimConfig], Sequence[int]]) -> list[list[RunResult]]:
    spec, cfgs, indices = args
    return [_run_one(spec, cfgs, i) for i in indices]


def collect_runs(spec: ExperimentSpec, cfgs: Sequence[SimConfig]) -> list[list[RunResult]]:
    """Run every config on each of ``spec.runs`` paired draws.

    Returns one list per config, ordered by run index. Run ``i`` uses the same
    graph and simulation seed for every config.
    """
    indices = list(range(spec.runs))
    if spec.jobs > 1 and spec.runs > 1:
        chunks = [indices[k::spec.jobs] for k in range(spec.jobs)]
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            parts = list(pool.map(_run_batch, [(spec, cfgs, c) for c in chunks]))
        by_index: dict[int, list[RunResult]] = {}
        for chunk, part in zip(chunks, parts):
            by_index.update(zip(chunk, part))
        per_run = [by_index[i] for i in indices]
    else:
        per_run = _run_batch((spec, cfgs, indices))
    return [[results[k] for results in per_run] for k in range(len(cfgs))]


def repeat_runs(spec: ExperimentSpec, cfg_template: SimConfig) -> AggregateResult:
    return aggregate(collect_runs(spec, [cfg_template])[0])


@dataclass(frozen=True)
class SweepRow:
    tr: int
    mean_cost: float | None
    std_cost: float | None
    mean_rounds: float
    std_rounds: float
    aggregate: AggregateResult | None = dataclasses.field(default=None, repr=False, compare=False)


def sweep_tr(
    spec: ExperimentSpec,
    variant: Variant,
    tr_range: Iterable[int],
    initiator: InitiatorPolicy = MIN_DEGREE,
) -> list[SweepRow]:
    trs = list(tr_range)
    if not trs:
        raise ValueError("empty transition-round range")
    if not variant.is_fptp:
        raise ValueError(f"sweeps need a push-then-pull variant, got {variant.value}")
    cfgs = [SimConfig(variant, tr=tr, initiator=initiator) for tr in trs]
    rows = []
    for tr, results in zip(trs, collect_runs(spec, cfgs)):
        agg = aggregate(results)
        rows.append(
            SweepRow(
                tr=tr,
                mean_cost=agg.mean_round_cost.mean,
                std_cost=agg.mean_round_cost.std,
                mean_rounds=agg.total_rounds.mean,
                std_rounds=agg.total_rounds.std,
                aggregate=agg,
            )
        )
    return rows


def find_optimal_tr(rows: Sequence[SweepRow]) -> int:
    """Transition round with the lowest mean cost; the smaller one wins ties."""
    if not rows:
        raise ValueError("no sweep rows")
    priced = [r for r in rows if r.mean_cost is not None] or list(rows)
    best = min(priced, key=lambda r: (r.mean_cost if r.mean_cost is not None else 0.0, r.tr))
    return best.tr


TABLE_VARIANTS = (
    ("push", Variant.PUSH),
    ("pull", Variant.PULL),
    ("fptp", Variant.FPTP),
    ("afptp", Variant.ADAPTIVE_FPTP),
)


@dataclass(frozen=True)
class TableRow:
    n: int
    cells: dict[str, AggregateResult]

    def cost(self, name: str) -> float | None:
        return self.cells[name].mean_round_cost.mean

    def rounds(self, name: str) -> float:
        return self.cells[name].total_rounds.mean

    def as_record(self) -> dict[str, float | int | None]:
        record: dict[str, float | int | None] = {"n": self.n}
        for name, _ in TABLE_VARIANTS:
            record[f"{name}_cost"] = self.cost(name)
            record[f"{name}_rounds"] = self.rounds(name)
        return record


def comparison_table(
    sizes: Sequence[int],
    runs: int,
    base_seed: int = 0,
    m: int = 2,
    initiator: InitiatorPolicy = MIN_DEGREE,
    graph_mode: GraphMode = GraphMode.REGENERATE,
    jobs: int = 1,
) -> list[TableRow]:
    """Push, Pull, FPTP and adaptive FPTP side by side, TR = round(log2 N)."""
    rows = []
    for n in sizes:
        if n < 2:
            raise ValueError(f"table sizes need at least 2 nodes, got {n}")
        spec = ExperimentSpec(
            ba=BaParams.for_size(n, m=m, seed=base_seed),
            runs=runs,
            graph_mode=graph_mode,
            base_seed=base_seed,
            jobs=jobs,
        )
        tr = default_tr(n)
        cfgs = [SimConfig(v, tr=tr if v.is_fptp else None, initiator=initiator) for _, v in TABLE_VARIANTS]
        results = collect_runs(spec, cfgs)
        rows.append(TableRow(n, {name: aggregate(r) for (name, _), r in zip(TABLE_VARIANTS, results)}))
    return rows
