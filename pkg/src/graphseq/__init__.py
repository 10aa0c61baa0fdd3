"""Exact invariants of bounded-degree graph sequences.

Short-cycle span ranks over Q and prime fields, beta and cost estimates
with machine-checkable witnesses, Cayley-graph towers of finite quotients,
hyperfinite partitions, and exhaustive small-set expansion, all in exact
arithmetic.
"""

from .graphs import (
    Graph,
    GraphError,
    EquivalenceWitness,
    INFINITE,
    bfs_distance,
    build_graph,
    connected_components,
    domination_constant,
    girth,
    graph_union,
    max_q_net,
    read_edge_list,
    read_edge_list_path,
    spanning_forest,
    write_edge_list,
    write_edge_list_path,
)
from .cyclespace import (
    CellTimeout,
    CycleAccumulator,
    CycleVector,
    FieldSpec,
    cycle_rank,
    cycle_rank_profile,
    cyclomatic_number,
    enumerate_short_cycles,
    s_q,
    s_q_profile,
    walk_chain,
)
from .towers import (
    CayleyGraph,
    CompressionResult,
    HomologyReport,
    TowerSpec,
    TowerError,
    cayley_graph,
    coset_compression,
    known_rank_gradient_term,
    load_tower_descriptor,
    make_tower,
    schreier_homology_dim,
)
from .sequences import (
    GraphSequence,
    SequenceError,
    cycle_graph,
    complete_graph,
    high_girth_regular,
    make_sequence,
    path_graph,
    torus_coordinates,
    torus_graph,
)
from .hyperfinite import (
    CoveringFamily,
    CoveringPartitionResult,
    ExpansionReport,
    Partition,
    PartitionError,
    ValidationResult,
    box_partition,
    covering_cut_bound,
    edge_boundary_size,
    min_small_set_expansion,
    partition_from_covering,
    tree_partition,
    validate_partition,
)
from .invariants import (
    BetaFragment,
    CostFragment,
    CostStrategy,
    CounterExample,
    InequalityReport,
    InvariantError,
    SandwichReport,
    beta_estimate,
    certify_equivalence,
    compression_graph,
    cost_upper_bound,
    edge_number_estimate,
    equivalence_rank_inequalities,
    sandwich_report,
)

__version__ = "0.1.0"
