"""Exit criteria. Each test prints one PASS/FAIL line; a summary is shown at the end of the run.

Set GOSSIPSIM_SLOW=1 to include the N=32768 sweep.
"""

import math
import os

import numpy as np
import pytest
from hypothesis import given, settings

from gossipsim import (
    MAX_DEGREE,
    MIN_DEGREE,
    BaParams,
    Graph,
    InitiatorPolicy,
    SimConfig,
    Variant,
    build_rich_table,
    default_tr,
    generate_ba,
    run,
)
from gossipsim.harness import ExperimentSpec, comparison_table, find_optimal_tr, repeat_runs, sweep_tr
from gossipsim.protocol import simulate
from oracles import brute_force_rich, differential_k, exact_pull_completion
from test_graph import simple_graphs

LINES: list[str] = []


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def table():
    # runs=500, min-degree initiator, TR = round(log2 N)
    return {row.n: row for row in comparison_table([128, 256, 512, 1024, 2048, 4096], runs=500, base_seed=2024)}


@pytest.mark.parametrize("n", [128, 512, 4096])
def test_a1_table_ordering(table, n):
    row = table[n]
    rounds = {k: row.rounds(k) for k in ("afptp", "fptp", "pull", "push")}
    cost = {k: row.cost(k) for k in ("afptp", "fptp", "pull", "push")}
    ok = (
        rounds["afptp"] < rounds["fptp"] < rounds["pull"] < rounds["push"]
        and cost["afptp"] < cost["fptp"] < min(cost["pull"], cost["push"])
    )
    detail = "rounds " + " < ".join(f"{k}={v:.2f}" for k, v in rounds.items())
    detail += "; cost " + ", ".join(f"{k}={v:.2f}" for k, v in cost.items())
    report(f"A1 ordering N={n}", ok, detail)


def test_a2_adaptive_fptp_cost_band(table):
    costs = {n: row.cost("afptp") for n, row in sorted(table.items())}
    ok = all(1.0 <= c <= 2.2 for c in costs.values())
    report("A2 adaptive FPTP cost in [1.0, 2.2]", ok, ", ".join(f"N={n}: {c:.3f}" for n, c in costs.items()))


def test_a3_sweep_minimum():
    spec = ExperimentSpec(ba=BaParams(n=4096), runs=200, base_seed=33)
    rows = sweep_tr(spec, Variant.ADAPTIVE_FPTP, range(4, 25))
    best = find_optimal_tr(rows)
    curve = " ".join(f"{r.tr}:{r.mean_cost:.3f}" for r in rows)
    report("A3 optimal TR at N=4096 in [9, 15]", 9 <= best <= 15, f"argmin={best} (log2 N = 12); {curve}")


def test_a4_initiator_degree_in_pull():
    spec = ExperimentSpec(ba=BaParams(n=4096), runs=500, base_seed=44)
    hub = repeat_runs(spec, SimConfig(Variant.PULL, initiator=MAX_DEGREE)).total_rounds.mean
    leaf = repeat_runs(spec, SimConfig(Variant.PULL, initiator=MIN_DEGREE)).total_rounds.mean
    report("A4 pull: max-degree source faster by >= 1 round", hub <= leaf - 1, f"max-degree {hub:.2f}, min-degree {leaf:.2f}")


def random_test_graph(rng):
    n = int(rng.integers(2, 257))
    if rng.random() < 0.7:
        m = int(rng.integers(1, 5))
        return generate_ba(BaParams.for_size(n, m=m, seed=int(rng.integers(2**63))))
    parents = [int(rng.integers(0, v)) for v in range(1, n)]
    edges = {(p, v) for v, p in zip(range(1, n), parents)}
    for _ in range(int(rng.integers(0, 2 * n))):
        a, b = sorted(int(x) for x in rng.integers(0, n, size=2))
        if a != b:
            edges.add((a, b))
    return Graph.from_edges(n, sorted(edges))


def check_run(g, adj, rich, cfg):
    """Return a list of violated properties for one traced run."""
    bad = []
    state, result = simulate(g, None, cfg, trace=True)
    n = g.node_count
    informed_round = state.informed_round
    prev_end = 1
    logs = {log.round: log for log in result.trace}
    first_push: dict[int, int] = {}
    pull_asks: dict[int, list[int]] = {}
    for r in result.rounds:
        log = logs[r.round]
        callers = log.callers.tolist()
        targets = log.targets.tolist()
        if r.spreaders_begin != prev_end or r.spreaders_end < r.spreaders_begin:
            bad.append(f"monotonicity round {r.round}")
        prev_end = r.spreaders_end
        if r.fresh != int(np.sum(informed_round == r.round)):
            bad.append(f"fresh != newly informed, round {r.round}")
        started = [v for v in range(n) if 0 <= informed_round[v] < r.round]
        if cfg.variant is Variant.PUSH_PULL:
            expected = n
        elif cfg.variant is Variant.DIFFERENTIAL_PUSH:
            expected = sum(differential_k(adj, v) for v in started)
        elif r.mode == "push":
            expected = len(started)
        else:
            expected = n - len(started)
        if r.calls != expected or len(callers) != r.calls:
            bad.append(f"call accounting round {r.round}: {r.calls} vs {expected}")
        if r.calls < r.fresh:
            bad.append(f"calls < fresh round {r.round}")
        if (r.fresh == 0) != math.isinf(r.cost) or (math.isfinite(r.cost) and r.cost < 1):
            bad.append(f"cost {r.cost} round {r.round}")
        for u, t in zip(callers, targets):
            if t not in adj[u]:
                bad.append(f"call {u}->{t} is not along an edge")
        if r.mode == "pull":
            for u, t in zip(callers, targets):
                if 0 <= informed_round[u] < r.round:
                    bad.append(f"spreader {u} called in pull mode round {r.round}")
                pull_asks.setdefault(u, []).append(t)
        elif r.mode == "push":
            for u, t in zip(callers, targets):
                first_push.setdefault(u, t)
    if cfg.variant in (Variant.ADAPTIVE_PUSH, Variant.ADAPTIVE_FPTP):
        for u, t in first_push.items():
            if t != rich[u]:
                bad.append(f"first push of {u} went to {t}, rich is {rich[u]}")
    if cfg.variant in (Variant.ADAPTIVE_PULL, Variant.ADAPTIVE_FPTP):
        for u, asks in pull_asks.items():
            if any(t != rich[u] for t in asks[0::2]):
                bad.append(f"node {u} broke rich/random alternation: {asks}")
    again = run(g, None, cfg, trace=True)
    same_trace = all(
        a.round == b.round and np.array_equal(a.callers, b.callers) and np.array_equal(a.targets, b.targets)
        for a, b in zip(result.trace, again.trace)
    )
    if again != result or not same_trace:
        bad.append("rerun with the same seed differed")
    return bad, result.total_rounds


def test_a5_property_suite():
    rng = np.random.default_rng(5)
    variants = list(Variant)
    total_rounds = 0
    runs = 0
    failures = []
    while total_rounds < 10_000:
        g = random_test_graph(rng)
        adj = [g.adjacency(v) for v in range(g.node_count)]
        rich = brute_force_rich(adj)
        variant = variants[runs % len(variants)]
        tr = int(rng.integers(1, 2 * default_tr(g.node_count) + 2))
        initiator = InitiatorPolicy("random") if runs % 3 else MIN_DEGREE
        cfg = SimConfig(variant, tr=tr, initiator=initiator, seed=int(rng.integers(2**63)))
        bad, rounds = check_run(g, adj, rich, cfg)
        failures.extend(f"{variant.value} N={g.node_count}: {b}" for b in bad)
        total_rounds += rounds
        runs += 1
    detail = f"{runs} runs, {total_rounds} rounds, {len(failures)} violations"
    if failures:
        detail += "; first: " + failures[0]
    report("A5 exact property suite", not failures, detail)


@settings(max_examples=300, deadline=None, derandomize=True)
@given(simple_graphs(max_nodes=200))
def _rich_matches_oracle(g):
    assert build_rich_table(g).rich.tolist() == brute_force_rich([g.adjacency(v) for v in range(g.node_count)])


def test_a6_rich_table_oracle():
    _rich_matches_oracle()
    checked = 300
    for n in range(2, 201):
        for m in (1, 2, 3):
            g = generate_ba(BaParams.for_size(n, m=m, seed=n * 7 + m))
            adj = [g.adjacency(v) for v in range(g.node_count)]
            assert build_rich_table(g).rich.tolist() == brute_force_rich(adj), (n, m)
            checked += 1
    report("A6a rich table == brute-force argmax", True, f"{checked} graphs up to 200 nodes")


def test_a6_pull_path_markov_chain():
    runs = 100_000
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    exact = exact_pull_completion([[1], [0, 2], [1]], 0, adaptive=False, horizon=30)
    assert all(exact[k] == 0.5 ** (k - 1) for k in range(2, 31))
    counts: dict[int, int] = {}
    for seed in range(runs):
        k = run(g, None, SimConfig(Variant.PULL, initiator=InitiatorPolicy("node", 0), seed=seed)).total_rounds
        counts[k] = counts.get(k, 0) + 1
    # bins with expected count >= 5; everything beyond is pooled
    last = max(k for k, p in exact.items() if p * runs >= 5)
    bins = {k: float(exact.get(k, 0)) for k in range(1, last + 1)}
    bins[last + 1] = 1 - sum(bins.values())
    observed = {k: counts.get(k, 0) for k in range(1, last + 1)}
    observed[last + 1] = sum(c for k, c in counts.items() if k > last)
    worst = 0.0
    for k, p in bins.items():
        sigma = math.sqrt(p * (1 - p) / runs)
        z = abs(observed[k] / runs - p) / sigma if sigma > 0 else (0.0 if observed[k] == 0 else math.inf)
        worst = max(worst, z)
    report("A6b pull on 3-node path matches exact chain", worst <= 3, f"{runs} runs, max |z| = {worst:.2f} over {len(bins)} bins")


def test_a7_ba_structure():
    problems = []
    for n, m, m0 in [(1000, 2, 3), (4096, 2, 3), (2000, 1, 2), (2000, 3, 5), (500, 4, 4)]:
        params = BaParams(n=n, m=m, m0=m0, seed=n + m)
        g = generate_ba(params)
        if g.edge_count != m0 * (m0 - 1) // 2 + m * (n - m0):
            problems.append(f"edge count n={n}")
        if not g.is_connected():
            problems.append(f"disconnected n={n}")
        if g.degrees[m0:].min() < m:
            problems.append(f"non-core degree < m, n={n}")
    heavy = 0
    for seed in range(100):
        g = generate_ba(BaParams(n=10_000, m=2, seed=seed))
        heavy += g.degrees.max() > 5 * g.degrees.mean()
    ok = not problems and heavy >= 95
    report("A7 BA structure", ok, f"{problems or 'edge count, connectivity, min degree ok'}; heavy tail in {heavy}/100 seeds")


@pytest.mark.slow
@pytest.mark.skipif(os.environ.get("GOSSIPSIM_SLOW") != "1", reason="set GOSSIPSIM_SLOW=1 for the N=32768 sweep")
def test_a3_paper_scale_sweep():
    spec = ExperimentSpec(ba=BaParams(n=32768), runs=100, base_seed=77)
    rows = sweep_tr(spec, Variant.ADAPTIVE_FPTP, range(8, 25))
    best = find_optimal_tr(rows)
    report("A3-slow optimal TR at N=32768 in [12, 18]", 12 <= best <= 18, f"argmin={best}")
