"""Truncated pivot correlation clustering.

Cluster the vertices of a signed (similar/dissimilar) graph by running only
r rounds of random-rank pivoting, then measure exactly what the truncation
costs: which extra edge disagreements appear, how they charge to bad
triangles, and how the truncated run behaves as a streaming, message
passing, sharded, or local-query computation.

The public layers:

* :mod:`rpivot.graph` - immutable graphs, rank draws, clusterings, text I/O
* :mod:`rpivot.generators` - standard families and adversarial instances
* :mod:`rpivot.pivot` - full and truncated pivot runs, extra-mistake audit
* :mod:`rpivot.exact` - brute-force optimum, exhaustive and sampled costs
* :mod:`rpivot.oracle` - query oracles, stack traces, triangle charging
* :mod:`rpivot.executors` - streaming / message-passing / sharded / probe
* :mod:`rpivot.experiments` - ratio, width, and adversarial studies
* :mod:`rpivot.verify` - randomized and exhaustive self-check suites
* :mod:`rpivot.cli` - the ``rpivot`` command
"""

from .errors import ClaimViolation, QueryBudgetExceeded
from .graph import (
    Clustering,
    Graph,
    GraphFormatError,
    RankAssignment,
    RankKind,
    build_graph,
    clustering_cost,
    is_refinement,
    make_rng,
    random_integer_ranks,
    random_permutation,
    read_edge_list,
    read_graph_text,
    same_partition,
    substream,
    write_graph_text,
)
from .generators import (
    AdversarialInstance,
    LayeredDimensions,
    LayeredHost,
    clique_plus_path,
    cycle_graph,
    disjoint_cliques,
    erdos_renyi,
    layered_dimensions,
    layered_host,
    layered_line_graph,
    path_graph,
    petersen_graph,
    small_graphs,
)
from .pivot import (
    ExtraMistakes,
    MistakeCase,
    PivotRun,
    RPivotState,
    assemble_clustering,
    extra_mistakes,
    parallel_pivot_full,
    r_pivot,
    r_pivot_variant,
    run_report,
    sequential_pivot,
)
from .exact import (
    ExhaustiveStats,
    MonteCarloStats,
    OptResult,
    bad_triangles,
    brute_force_opt,
    exhaustive_permutation_stats,
    expected_cost_mc,
    greedy_triangle_packing,
)
from .oracle import (
    ChargeRecord,
    PivotOracle,
    QueryTrace,
    StackPath,
    WidthStudyResult,
    charge,
    charging_round,
    direct_queries,
    direct_queries_pair,
    direct_query_case,
    pair_oracle,
    stack_path,
    validate_trace,
    vertex_oracle,
    width_study,
)
from .executors import (
    LcaAnswer,
    LocalReport,
    MpcReport,
    StreamingReport,
    lca_cluster_all,
    lca_query,
    local_execute,
    mpc_execute,
    streaming_execute,
)
from .experiments import (
    CliquePathReport,
    HostMatchingResult,
    LayeredSweepResult,
    RatioReport,
    SweepPoint,
    clique_path_report,
    host_matching_counts,
    host_matching_study,
    layered_sweep,
    ratio_study,
    sweep_sizes,
)
from .verify import (
    CheckOutcome,
    VerifyReport,
    exhaustive_small_checks,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "ClaimViolation",
    "QueryBudgetExceeded",
    "Clustering",
    "Graph",
    "GraphFormatError",
    "RankAssignment",
    "RankKind",
    "build_graph",
    "clustering_cost",
    "is_refinement",
    "make_rng",
    "random_integer_ranks",
    "random_permutation",
    "read_edge_list",
    "read_graph_text",
    "same_partition",
    "substream",
    "write_graph_text",
    "AdversarialInstance",
    "LayeredDimensions",
    "LayeredHost",
    "clique_plus_path",
    "cycle_graph",
    "disjoint_cliques",
    "erdos_renyi",
    "layered_dimensions",
    "layered_host",
    "layered_line_graph",
    "path_graph",
    "petersen_graph",
    "small_graphs",
    "ExtraMistakes",
    "MistakeCase",
    "PivotRun",
    "RPivotState",
    "assemble_clustering",
    "extra_mistakes",
    "parallel_pivot_full",
    "r_pivot",
    "r_pivot_variant",
    "run_report",
    "sequential_pivot",
    "ExhaustiveStats",
    "MonteCarloStats",
    "OptResult",
    "bad_triangles",
    "brute_force_opt",
    "exhaustive_permutation_stats",
    "expected_cost_mc",
    "greedy_triangle_packing",
    "ChargeRecord",
    "PivotOracle",
    "QueryTrace",
    "StackPath",
    "WidthStudyResult",
    "charge",
    "charging_round",
    "direct_queries",
    "direct_queries_pair",
    "direct_query_case",
    "pair_oracle",
    "stack_path",
    "validate_trace",
    "vertex_oracle",
    "width_study",
    "LcaAnswer",
    "LocalReport",
    "MpcReport",
    "StreamingReport",
    "lca_cluster_all",
    "lca_query",
    "local_execute",
    "mpc_execute",
    "streaming_execute",
    "CliquePathReport",
    "HostMatchingResult",
    "LayeredSweepResult",
    "RatioReport",
    "SweepPoint",
    "clique_path_report",
    "host_matching_counts",
    "host_matching_study",
    "layered_sweep",
    "ratio_study",
    "sweep_sizes",
    "CheckOutcome",
    "VerifyReport",
    "exhaustive_small_checks",
    "run_suite",
    "__version__",
]
