"""homshift: local-homophily analysis, goal-directed graph rewiring,
distribution-shift splits, fairness metrics, and a linear-GNN disparity
model, with deterministic seeded pipelines throughout."""

from .graph import (
    INVALID,
    Graph,
    NodeTable,
    connected_components,
    filter_top_classes,
    induced_subgraph,
    largest_connected_component,
    load_edge_list,
    load_node_table,
    save_edge_list,
    save_node_table,
)
from .homophily import (
    BetaGoal,
    HomophilyHistogram,
    beta_goal_histogram,
    bin_index,
    emd,
    global_homophily,
    histogram,
    homophily_histogram,
    local_homophily,
    local_homophily_all,
)
from .metrics import (
    MetricRecord,
    PredictionTable,
    baseline_adjust,
    delta_metrics,
    load_predictions,
    micro_f1,
    multiclass_statistical_parity,
    per_class_statistical_parity,
    save_predictions,
    statistical_parity,
)
from .rewire import (
    EditLog,
    EditRecord,
    GenerationReport,
    NodeGoal,
    TransportPlan,
    assign_node_goals,
    edge_move_bounds,
    generate,
    refine_phase,
    rewire_phase,
    transport_plan,
)
from .splits import (
    EXCLUDED,
    TAG_NAMES,
    TEST,
    TRAIN,
    VAL,
    SplitAssignment,
    concentrate,
    invert,
    load_split,
    save_split,
    save_split_diagnostics,
    split_diagnostics,
    stratified_split,
)
from .synth import two_class_sbm
from .theory import (
    SweepRow,
    TheoryParams,
    TheoryResult,
    aggregation_coefficient,
    alpha_slope,
    expected_logit_gap,
    expected_weights,
    monte_carlo_gap,
    sample_training_representations,
    save_sweep,
    sweep_alpha,
)

__version__ = "0.1.0"

__all__ = [
    "INVALID",
    "Graph",
    "NodeTable",
    "connected_components",
    "filter_top_classes",
    "induced_subgraph",
    "largest_connected_component",
    "load_edge_list",
    "load_node_table",
    "save_edge_list",
    "save_node_table",
    "BetaGoal",
    "HomophilyHistogram",
    "beta_goal_histogram",
    "bin_index",
    "emd",
    "global_homophily",
    "histogram",
    "homophily_histogram",
    "local_homophily",
    "local_homophily_all",
    "MetricRecord",
    "PredictionTable",
    "baseline_adjust",
    "delta_metrics",
    "load_predictions",
    "micro_f1",
    "multiclass_statistical_parity",
    "per_class_statistical_parity",
    "save_predictions",
    "statistical_parity",
    "EditLog",
    "EditRecord",
    "GenerationReport",
    "NodeGoal",
    "TransportPlan",
    "assign_node_goals",
    "edge_move_bounds",
    "generate",
    "refine_phase",
    "rewire_phase",
    "transport_plan",
    "EXCLUDED",
    "TAG_NAMES",
    "TEST",
    "TRAIN",
    "VAL",
    "SplitAssignment",
    "concentrate",
    "invert",
    "load_split",
    "save_split",
    "save_split_diagnostics",
    "split_diagnostics",
    "stratified_split",
    "two_class_sbm",
    "SweepRow",
    "TheoryParams",
    "TheoryResult",
    "aggregation_coefficient",
    "alpha_slope",
    "expected_logit_gap",
    "expected_weights",
    "monte_carlo_gap",
    "sample_training_representations",
    "save_sweep",
    "sweep_alpha",
]
