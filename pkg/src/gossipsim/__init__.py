"""Round-synchronous gossip simulation on scale-free networks."""

from .graph import (
    MAX_DEGREE,
    MIN_DEGREE,
    UNIFORM_RANDOM,
    BaParams,
    EdgeListError,
    Graph,
    InitiatorError,
    InitiatorPolicy,
    ParameterError,
    RichNeighbourTable,
    build_rich_table,
    degree,
    generate_ba,
    load_edge_list,
    save_edge_list,
    select_initiator,
)
from .metrics import INFINITE, AggregateResult, RoundMetrics, RunResult, aggregate, round_cost, summarize_run
from .protocol import SimConfig, SimState, Variant, default_tr, init_sim, run

__version__ = "0.1.0"
