"""Geometric t-spanner toolkit.

Builds the greedy spanner of a point set in space linear in the
well-separated pair decomposition, alongside reference constructions
(quadratic greedy, theta-graph, one-edge-per-WSPD-pair spanner), exact and
sampled dilation verification, point-set generators, and a benchmark CLI.
"""

from .baselines import ThetaConfig, greedy_naive, theta_graph, wspd_spanner
from .core import (
    GraphStats,
    PointSet,
    SpannerGraph,
    astar_to_region,
    bounded_sssp,
    distance,
)
from .datasets import (
    GeneratorSpec,
    generate,
    graph_from_edges,
    read_edges,
    read_points,
    write_edges,
    write_points,
)
from .greedy import (
    PRUNE_BASIC,
    PRUNE_SHARPENED,
    BuildReport,
    CandidateEntry,
    GreedyConfig,
    GreedySpannerBuilder,
    PairQueue,
    PairRuntimeState,
    greedy_spanner_build,
)
from .verify import (
    DilationReport,
    OneEdgePerPairReport,
    WspdAuditReport,
    audit_one_edge_per_pair,
    audit_wspd,
    max_dilation_exact,
    max_dilation_sampled,
)
from .wspd import (
    SplitTree,
    SplitTreeNode,
    Wspd,
    WspdPair,
    build_split_tree,
    compute_wspd,
    find_covering_pair,
    pairs_sorted_by_min,
)

__version__ = "0.1.0"

__all__ = [
    "BuildReport",
    "CandidateEntry",
    "DilationReport",
    "GeneratorSpec",
    "GraphStats",
    "GreedyConfig",
    "GreedySpannerBuilder",
    "OneEdgePerPairReport",
    "PRUNE_BASIC",
    "PRUNE_SHARPENED",
    "PairQueue",
    "PairRuntimeState",
    "PointSet",
    "SpannerGraph",
    "SplitTree",
    "SplitTreeNode",
    "ThetaConfig",
    "Wspd",
    "WspdAuditReport",
    "WspdPair",
    "astar_to_region",
    "audit_one_edge_per_pair",
    "audit_wspd",
    "bounded_sssp",
    "build_split_tree",
    "compute_wspd",
    "distance",
    "find_covering_pair",
    "generate",
    "graph_from_edges",
    "greedy_naive",
    "greedy_spanner_build",
    "max_dilation_exact",
    "max_dilation_sampled",
    "pairs_sorted_by_min",
    "read_edges",
    "read_points",
    "theta_graph",
    "write_edges",
    "write_points",
    "wspd_spanner",
]
