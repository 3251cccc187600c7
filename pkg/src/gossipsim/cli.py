"""Command-line front end: ``generate``, ``run``, ``sweep`` and ``table``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

from .graph import BaParams, EdgeListError, Graph, InitiatorError, InitiatorPolicy, ParameterError, build_rich_table, generate_ba, load_edge_list, save_edge_list
from .harness import TABLE_VARIANTS, ExperimentSpec, GraphMode, comparison_table, find_optimal_tr, sweep_tr
from .protocol import SimConfig, Variant, run

SEED_ENV = "GOSSIPSIM_SEED"


class UsageError(Exception):
    pass


def fmt(x: float | int | None) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _json_num(x: float | int | None):
    # JSON has no infinity literal
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _seed_arg(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _sizes(text: str) -> list[int]:
    return [_positive(part) for part in text.split(",")]


def _initiator(text: str) -> InitiatorPolicy:
    try:
        return InitiatorPolicy.parse(text)
    except InitiatorError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _ba_params(args, seed: int) -> BaParams:
    if args.n is None:
        raise UsageError("--n is required")
    params = BaParams.for_size(args.n, m=args.m, m0=args.m0, seed=seed)
    try:
        params.validate()
    except ParameterError as exc:
        raise UsageError(str(exc))
    return params


def cmd_generate(args) -> int:
    seed = _seed(args)
    g = generate_ba(_ba_params(args, seed))
    buf = io.StringIO()
    save_edge_list(g, buf)
    _emit(buf.getvalue(), args.out)
    print(f"nodes={g.node_count} edges={g.edge_count} max_degree={int(g.degrees.max())}", file=sys.stderr)
    return 0


def _load_graph(path: str) -> Graph:
    try:
        with open(path, encoding="utf-8") as fh:
            return load_edge_list(fh)
    except EdgeListError as exc:
        raise UsageError(f"{path}: {exc}")


def cmd_run(args) -> int:
    seed = _seed(args)
    variant = Variant(args.protocol)
    if args.graph:
        g = _load_graph(args.graph)
    else:
        g = generate_ba(_ba_params(args, seed))
    rich = build_rich_table(g) if variant.is_adaptive else None
    cfg = SimConfig(variant, tr=args.tr, initiator=args.initiator, max_rounds=args.max_rounds, seed=seed)
    try:
        result = run(g, rich, cfg)
    except InitiatorError as exc:
        raise UsageError(str(exc))
    summary = {
        "protocol": variant.value,
        "n": g.node_count,
        "tr": cfg.transition_round(g.node_count) if variant.is_fptp else None,
        "initiator": result.initiator,
        "initiator_degree": result.initiator_degree,
        "rounds": result.total_rounds,
        "completed": result.completed,
        "total_calls": result.total_calls,
        "mean_round_cost": result.mean_round_cost,
        "normalized_cost": result.normalized_cost,
    }
    if args.format == "json":
        doc = {
            "summary": summary,
            "rounds": [
                {
                    "round": r.round,
                    "mode": r.mode,
                    "spreaders": r.spreaders_begin,
                    "fresh": r.fresh,
                    "calls": r.calls,
                    "cost": _json_num(r.cost),
                }
                for r in result.rounds
            ],
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        rows = [(r.round, r.spreaders_begin, r.fresh, r.calls, r.cost) for r in result.rounds]
        _emit(_csv_text(["round", "spreaders", "fresh", "calls", "cost"], rows), args.out)
        print("summary " + " ".join(f"{k}={fmt(v)}" for k, v in summary.items()), file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    if args.tr_min > args.tr_max:
        raise UsageError(f"--tr-min ({args.tr_min}) exceeds --tr-max ({args.tr_max})")
    seed = _seed(args)
    spec = ExperimentSpec(
        ba=_ba_params(args, seed),
        runs=args.runs,
        graph_mode=GraphMode(args.graph_mode),
        base_seed=seed,
        jobs=args.jobs,
    )
    rows = sweep_tr(spec, Variant(args.protocol), range(args.tr_min, args.tr_max + 1), initiator=args.initiator)
    _emit(
        _csv_text(
            ["tr", "mean_cost", "std_cost", "mean_rounds", "std_rounds"],
            [(r.tr, r.mean_cost, r.std_cost, r.mean_rounds, r.std_rounds) for r in rows],
        ),
        args.out,
    )
    print(f"optimal_tr={find_optimal_tr(rows)}", file=sys.stderr)
    return 0


def cmd_table(args) -> int:
    seed = _seed(args)
    rows = comparison_table(
        args.sizes, args.runs, base_seed=seed, m=args.m, initiator=args.initiator,
        graph_mode=GraphMode(args.graph_mode), jobs=args.jobs,
    )
    header = ["n"] + [f"{name}_{col}" for name, _ in TABLE_VARIANTS for col in ("cost", "rounds")]
    _emit(_csv_text(header, [[row.as_record()[h] for h in header] for row in rows]), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gossipsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def ba_flags(p, n_required=False):
        p.add_argument("--n", type=_positive, required=n_required, help="node count")
        p.add_argument("--m", type=_positive, default=2, help="edges per new node (default 2)")
        p.add_argument("--m0", type=_positive, default=None, help="complete seed-core size (default m+1)")

    def common(p):
        p.add_argument("--seed", type=_seed_arg, default=None, help=f"RNG seed (fallback ${SEED_ENV}, then 0)")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")

    p = sub.add_parser("generate", help="write a Barabási-Albert edge list")
    ba_flags(p, n_required=True)
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="simulate one dissemination and emit per-round metrics")
    ba_flags(p)
    p.add_argument("--graph", help="edge-list file to use instead of generating")
    p.add_argument("--protocol", required=True, choices=[v.value for v in Variant])
    p.add_argument("--tr", type=_positive, default=None, help="transition round (default round(log2 N))")
    p.add_argument("--initiator", type=_initiator, default=InitiatorPolicy("min-degree"),
                   help="min-degree | max-degree | random | node:<id> | degree:<k>")
    p.add_argument("--max-rounds", type=_positive, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    common(p)
    p.set_defaults(func=cmd_run)

    def experiment_flags(p):
        p.add_argument("--runs", type=_positive, default=1000)
        p.add_argument("--initiator", type=_initiator, default=InitiatorPolicy("min-degree"))
        p.add_argument("--graph-mode", choices=[g.value for g in GraphMode], default="regenerate")
        p.add_argument("--jobs", type=_positive, default=1, help="worker processes; never changes results")

    p = sub.add_parser("sweep", help="average cost and rounds over a range of transition rounds")
    ba_flags(p, n_required=True)
    p.add_argument("--protocol", choices=["fptp", "adaptive-fptp"], default="adaptive-fptp")
    p.add_argument("--tr-min", type=_positive, required=True)
    p.add_argument("--tr-max", type=_positive, required=True)
    experiment_flags(p)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="Push / Pull / FPTP / adaptive FPTP comparison per network size")
    p.add_argument("--sizes", type=_sizes, required=True, help="comma-separated node counts")
    p.add_argument("--m", type=_positive, default=2)
    experiment_flags(p)
    common(p)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        print(f"gossipsim: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gossipsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
