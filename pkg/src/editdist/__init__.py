"""Edit distance between weighted dendrograms and graphs with editable-space weights."""

from __future__ import annotations

from .blp import BlpProblem, BlpSolution, build_problem, delta_cost, solve, write_lp
from .dendrogram import Dendrogram, TreeError, normalize_order2, parse_newick, tree_norm
from .engine import DistanceTable, compute_distance, distance_matrix
from .graphs import (
    EditableGraph,
    GraphMapping,
    Segment,
    apply_edit,
    brute_force_graph_distance,
    edit_cost,
    graph_mapping_cost,
    open_star,
    segment_sum,
    segment_weight,
    validate_graph_mapping,
)
from .ingest import (
    BenchmarkRecord,
    SampledFunction,
    merge_tree_from_samples,
    random_dendrogram,
    run_benchmark,
    single_linkage_dendrogram,
)
from .mapping import (
    TreeMapping,
    brute_force_tree_distance,
    reduce_mapping,
    tree_mapping_cost,
    validate_tree_mapping,
)
from .posets import (
    FinitePoset,
    PersistentSet,
    display_poset,
    merge_tree_from_display,
    transitive_closure,
    transitive_reduction,
    weighted_graph_from_poset,
)
from .spaces import (
    EditableSpace,
    ProductSpace,
    RealSpace,
    SpaceMismatchError,
    StepFunction,
    StepSpace,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
