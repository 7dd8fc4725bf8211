"""Separation-rank toolkit: exact oracle, certified bounds, budget planner.

The package turns three questions into executable checks:

  * what separation rank does a concrete small mixer or linearized
    transformer actually have? (oracle, via exact coefficient
    matricization over the rationals)
  * what rank can it at most have? (bounds, via per-layer rewrite rules
    and whole-stack closed forms, with a transformer lower bound)
  * how should a parameter budget split between depth and width?
    (planner, plus the sweep grid the training harness consumes)

All symbolic computation is exact; floating point appears only in
log-space bound tracks and planner objectives.
"""

from srk.arch import (
    ArchSpec,
    WeightAssignment,
    build_linear_transformer,
    build_mixer,
    param_count,
    sample_weights,
    spec_from_json,
    spec_to_json,
    symbolic_forward,
)
from srk.bounds import (
    Bound,
    attention_layer_bound,
    elementary_rule_bound,
    gap_ratio,
    large_p_mixer_bound,
    mixer_closed_form,
    mixer_layer_bound,
    propagate_bound,
    transformer_closed_form,
    transformer_lower_bound,
    verify_regime_conditions,
)
from srk.oracle import (
    Partition,
    SepProfile,
    enumerate_balanced_partitions,
    exact_rank,
    matricize,
    sep_profile,
    sep_rank_entry,
)
from srk.planner import (
    PlanResult,
    SweepConfig,
    check_dominance,
    depth_scaling_threshold,
    depth_selection,
    grid_search_optimum,
    make_sweep_config,
    piecewise_objective,
)
from srk.poly import Poly, PolyMatrix, input_matrix

__version__ = "0.1.0"

__all__ = [
    "ArchSpec",
    "Bound",
    "Partition",
    "PlanResult",
    "Poly",
    "PolyMatrix",
    "SepProfile",
    "SweepConfig",
    "WeightAssignment",
    "attention_layer_bound",
    "build_linear_transformer",
    "build_mixer",
    "check_dominance",
    "depth_scaling_threshold",
    "depth_selection",
    "elementary_rule_bound",
    "enumerate_balanced_partitions",
    "exact_rank",
    "gap_ratio",
    "grid_search_optimum",
    "input_matrix",
    "large_p_mixer_bound",
    "make_sweep_config",
    "matricize",
    "mixer_closed_form",
    "mixer_layer_bound",
    "param_count",
    "piecewise_objective",
    "propagate_bound",
    "sample_weights",
    "sep_profile",
    "sep_rank_entry",
    "spec_from_json",
    "spec_to_json",
    "symbolic_forward",
    "transformer_closed_form",
    "transformer_lower_bound",
    "verify_regime_conditions",
]
