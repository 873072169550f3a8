"""Moran process simulation and exact analysis on graphs and digraphs.

Core pieces: an immutable graph type with structural queries, generators
for amplifier families (incubators, random regular cores, baselines), two
simulation kernels with identical absorption law plus an exact twin-class
fast path, a 2^n exact absorbing-chain solver, and closed-form bound and
auxiliary-chain analytics.
"""

from .graphs import (
    Digraph,
    GraphError,
    edge_boundary,
    graph_from_edgelist,
    graph_from_json,
    graph_to_edgelist,
    graph_to_json,
    is_biregular,
    is_strongly_connected,
    load_graph,
    save_graph,
)
from .exact import (
    CapacityError,
    ExactResult,
    MonotonicityReport,
    TimeBoundReport,
    exact_extinction,
    exact_extinction_from_set,
    expected_time_vs_bound,
    monotonicity_check,
)
from .generators import (
    ExpanderCertificate,
    GenerationError,
    IncubatorSpec,
    baseline_graph,
    beta_of,
    build_dense_incubator,
    build_incubator,
    certify_small_set_expander,
    incubator_count_bounds,
    incubator_counts,
    random_regular_graph,
)
from .engine import (
    Estimate,
    MutantConfiguration,
    SimOutcome,
    default_step_cap,
    estimate_extinction,
    run_effective,
    run_to_absorption,
    step,
    track_v3_trajectory,
    wilson_interval,
)
from .analytics import (
    BirthDeathChain,
    BoundReport,
    BoundValue,
    ChainHitting,
    DangerLemmaReport,
    DangerProfile,
    GamblersRuin,
    HeavySetReport,
    build_chain,
    chain_hitting_analysis,
    danger,
    danger_extinction_floor,
    gamblers_ruin,
    heavy_set,
    theorem_bounds,
    verify_danger_lemmas,
    verify_lower_bounds_exhaustive,
)
from .smallgraphs import connected_graphs, random_strongly_connected_digraphs

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
