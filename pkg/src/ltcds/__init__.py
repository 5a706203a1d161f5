"""LTCDS: rateless-coding distributed storage on random geometric graphs."""

__version__ = "0.1.0"

from .errors import ParameterError, SimulationError
from .estimation import Estimates, InsufficientVisits, compute_estimates, per_source_intervisit
from .ltcodec import (
    DecodeResult,
    StoragePacket,
    central_lt_encode,
    peel_decode,
    xor_payload,
    zero_payload,
)
from .netmodel import (
    Graph,
    GraphStats,
    connected_rgg,
    dump_graph,
    generate_rgg,
    graph_from_positions,
    graph_stats,
    is_connected,
    select_sources,
)
from .query import (
    PsEstimate,
    QueryPlan,
    SweepCell,
    SweepConfig,
    SweepRow,
    evaluate_ps,
    make_plan,
    run_cell,
    sweep,
)
from .seeding import derive_seed, spawn_rng
from .soliton import (
    DegreeDistribution,
    StorageDegreePmf,
    ideal_soliton,
    robust_soliton,
    sample_degree,
    storage_degree_pmf,
)
from .walksim import (
    RunConfig,
    StorageSnapshot,
    WalkStatistics,
    measure_walk_statistics,
    run,
    run_ltcds_i,
    run_ltcds_ii,
    run_update,
)

__all__ = [
    "ParameterError",
    "SimulationError",
    "Estimates",
    "InsufficientVisits",
    "compute_estimates",
    "per_source_intervisit",
    "DecodeResult",
    "StoragePacket",
    "central_lt_encode",
    "peel_decode",
    "xor_payload",
    "zero_payload",
    "Graph",
    "GraphStats",
    "connected_rgg",
    "dump_graph",
    "generate_rgg",
    "graph_from_positions",
    "graph_stats",
    "is_connected",
    "select_sources",
    "PsEstimate",
    "QueryPlan",
    "SweepCell",
    "SweepConfig",
    "SweepRow",
    "evaluate_ps",
    "make_plan",
    "run_cell",
    "sweep",
    "derive_seed",
    "spawn_rng",
    "DegreeDistribution",
    "StorageDegreePmf",
    "ideal_soliton",
    "robust_soliton",
    "sample_degree",
    "storage_degree_pmf",
    "RunConfig",
    "StorageSnapshot",
    "WalkStatistics",
    "measure_walk_statistics",
    "run",
    "run_ltcds_i",
    "run_ltcds_ii",
    "run_update",
]
