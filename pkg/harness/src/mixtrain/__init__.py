"""Training harness for budget-constrained mixer sweeps.

Consumes the sweep-configuration JSON emitted by ``srk sweep``, trains
one small mixer per cell, appends accuracies to a results CSV, and
extracts the best depth-to-width ratio per parameter budget.
"""

from mixtrain.analyze import RatioVerdict, analyze_results, analyze_sweep, read_results, verdicts_to_json
from mixtrain.config import (
    Hyperparameters,
    SweepCell,
    SweepConfig,
    desk_preset,
    load_config,
    mixing_param_count,
    selected_cell,
    selected_width,
    validate_cells,
)
from mixtrain.errors import ConfigurationError, DatasetMissing, MissingCells
from mixtrain.model import MixerClassifier, build_model, count_params, overhead_param_count
from mixtrain.train import CSV_HEADER, RunResult, SyntheticImages, run_sweep, train_run

__all__ = [
    "CSV_HEADER",
    "ConfigurationError",
    "DatasetMissing",
    "Hyperparameters",
    "MissingCells",
    "MixerClassifier",
    "RatioVerdict",
    "RunResult",
    "SweepCell",
    "SweepConfig",
    "SyntheticImages",
    "analyze_results",
    "analyze_sweep",
    "build_model",
    "count_params",
    "desk_preset",
    "load_config",
    "mixing_param_count",
    "overhead_param_count",
    "read_results",
    "run_sweep",
    "selected_cell",
    "selected_width",
    "train_run",
    "validate_cells",
    "verdicts_to_json",
]
